#pragma once

#include <array>
#include <vector>

namespace gammarod {

struct Rule1D {
  std::vector<double> points;   // on [0,1]
  std::vector<double> weights;  // sum to 1
};

/// n-point Gauss-Legendre rule mapped to [0,1].
Rule1D gauss_legendre(int n);

/// Degree-2 interior rule on the reference triangle; barycentric points,
/// weights sum to 1.
struct TriangleRule {
  std::array<std::array<double, 3>, 3> bary;
  std::array<double, 3> weights;
};
const TriangleRule& triangle_rule3();

}  // namespace gammarod
