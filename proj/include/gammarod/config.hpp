#pragma once

#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "gammarod/cross_section.hpp"
#include "gammarod/gamma_check.hpp"
#include "gammarod/limit_energy.hpp"
#include "gammarod/rod_geometry.hpp"
#include "gammarod/solver.hpp"

namespace gammarod {

using json = nlohmann::json;

/// Parses a scalar function spec: a number, or an object with "type" one of
/// constant, poly, trig, spline. Returns the function and writes the fully
/// resolved spec to `resolved`.
ScalarFunction parse_function(const json& spec, json& resolved);

struct GammaCheckConfig {
  std::vector<double> h{0.2, 0.1, 0.05, 0.025};
  SmoothState state;
  std::vector<WarpTerm> warp_terms;
  bool project = true;
  GammaQuadrature quad;
  double section_edge = 0.0;  // 0: use discretization.section_edge
};

struct RunConfig {
  json resolved;

  std::optional<Curve> curve;
  std::optional<PolygonSection> section;  // as given, before normalization
  MaterialField material;
  LoadCase loads;
  BoundaryCondition bc;
  int elements = 64;
  double section_edge = 0.0;    // 0: 5% of the section diameter
  std::string stiffness = "auto";  // auto | closed-form | cell
  SolveOptions solver;

  std::vector<double> rotations{0.0};

  std::vector<double> frenet_h{0.2, 0.1, 0.05, 0.025};
  int frenet_x1_samples = 41;

  int gradcheck_samples = 20;
  unsigned gradcheck_seed = 1;
  double gradcheck_amplitude = 0.1;
  int gradcheck_elements = 8;

  GammaCheckConfig gamma;
};

RunConfig parse_config(const json& j);
RunConfig load_config(const std::string& path);

}  // namespace gammarod
