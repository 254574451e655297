#pragma once

#include <array>
#include <variant>
#include <vector>

namespace gammarod {

/// Value and derivatives 0..3 at a point.
using Jet3 = std::array<double, 4>;

struct Polynomial {
  std::vector<double> coeffs;  // c0 + c1 x + c2 x^2 + ...
  Jet3 eval(double x) const;
};

/// Sum of a_i sin(f_i x + phi_i).
struct TrigSeries {
  std::vector<double> amplitudes;
  std::vector<double> frequencies;
  std::vector<double> phases;
  Jet3 eval(double x) const;
};

/// C^4 quintic interpolating spline. Clamped: end slopes are prescribed;
/// the remaining end conditions set the third derivative to zero.
class QuinticSpline {
 public:
  QuinticSpline(std::vector<double> knots, std::vector<double> values,
                double slope_left, double slope_right);
  Jet3 eval(double x) const;

  const std::vector<double>& knots() const { return knots_; }

 private:
  std::vector<double> knots_;
  // per interval: monomial coefficients in local t in [0,1]
  std::vector<std::array<double, 6>> coeffs_;
};

/// Scalar function of x1 with analytic derivatives through order 3.
class ScalarFunction {
 public:
  ScalarFunction() : impl_(Polynomial{{0.0}}) {}
  static ScalarFunction constant(double c) { return ScalarFunction(Polynomial{{c}}); }
  static ScalarFunction polynomial(std::vector<double> coeffs) {
    return ScalarFunction(Polynomial{std::move(coeffs)});
  }
  static ScalarFunction trig(std::vector<double> amplitudes, std::vector<double> frequencies,
                             std::vector<double> phases = {});
  static ScalarFunction spline(std::vector<double> knots, std::vector<double> values,
                               double slope_left = 0.0, double slope_right = 0.0);

  Jet3 jet(double x) const;
  double operator()(double x) const { return jet(x)[0]; }
  double derivative(double x, int order) const { return jet(x)[order]; }

  bool is_zero() const;

 private:
  using Impl = std::variant<Polynomial, TrigSeries, QuinticSpline>;
  explicit ScalarFunction(Impl impl) : impl_(std::move(impl)) {}
  Impl impl_;
};

}  // namespace gammarod
