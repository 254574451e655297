#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "gammarod/limit_energy.hpp"

namespace gammarod {

enum class BoundaryKind { Free, ClampedLeft, ClampedBoth };

/// Clamped ends prescribe (u, v2, v2', v3, v3', w); free ends fix the same
/// six values at x1 = 0 to zero, which removes the gauge family.
struct BoundaryCondition {
  BoundaryKind kind = BoundaryKind::ClampedBoth;
  std::array<double, 6> left{};
  std::array<double, 6> right{};
};

struct SolveOptions {
  double tol = 1e-9;  // on ||g_free|| / max(1, ||load_free||)
  int max_iter = 50;
  double contraction = 0.5;
  double sufficient_decrease = 1e-4;
  int continuation_steps = 1;
};

struct CompatibilityReport {
  bool ok = true;
  // [k] for f2 (k=0) and f3 (k=1)
  std::array<double, 2> integral{}, moment{};
  std::array<double, 2> integral_bound{}, moment_bound{};
  std::string message;
};

CompatibilityReport check_compatibility(const LoadCase& loads, const BoundaryCondition& bc,
                                        double length);

struct SolveReport {
  bool converged = false;
  int iterations = 0;    // gradient evaluations
  int newton_steps = 0;  // accepted steps
  double gradient_norm = 0.0;
  double tolerance = 0.0;  // absolute threshold actually used
  double energy = 0.0;
  std::vector<double> energies;  // J0 after each accepted step, starting value first
  std::vector<double> shifts;    // diagonal shift used per step
  bool hessian_psd = false;
  std::string message;
};

struct SolveResult {
  RodState state;
  SolveReport report;
};

/// Newton with backtracking on J0 = I0 - factor * load work. Throws
/// IncompatibleLoads for a free rod with loads failing the moment test.
SolveResult minimize(const DiscreteModel& model, const LoadCase& loads,
                     const BoundaryCondition& bc, const SolveOptions& opts,
                     const RodState* initial = nullptr, double load_factor = 1.0);

struct ContinuationStep {
  double factor;
  RodState state;
  SolveReport report;
};

/// Solves at factors s/steps, each warm-started from the previous. Stops at
/// the first unconverged step, which is the last entry.
std::vector<ContinuationStep> continuation(const DiscreteModel& model, const LoadCase& loads,
                                           const BoundaryCondition& bc, const SolveOptions& opts,
                                           int steps);

/// Dirichlet dof indices for the boundary condition.
std::vector<int> constrained_dofs(const BoundaryCondition& bc, int elements);

}  // namespace gammarod
