#pragma once

#include <ostream>
#include <string>

#include "gammarod/config.hpp"

namespace gammarod {

enum ExitCode {
  kExitOk = 0,
  kExitConfig = 1,
  kExitIncompatibleLoads = 2,
  kExitNonconvergence = 3,
  kExitGeometryRegime = 4,
};

struct RunOptions {
  int threads = 0;  // 0: all available cores
  bool plot_data = false;
};

/// Runs one command (section, solve, frenet-check, gradcheck, gamma-check)
/// and writes `<out>/<command>.json` plus any CSV artifacts.
int run(const std::string& command, const std::string& config_path, const std::string& out_dir,
        const RunOptions& opts, std::ostream& log);

struct DerivativeCheck {
  double gradient_rel_error = 0.0;
  double hessian_rel_error = 0.0;
  double hessian_asymmetry = 0.0;  // max |H - H^T| / max |H|
};

/// Central differences of I0 and of its gradient at `state`.
DerivativeCheck check_derivatives(const DiscreteModel& model, const RodState& state,
                                  double step = 1e-6);

int cli_main(int argc, char** argv);

}  // namespace gammarod
