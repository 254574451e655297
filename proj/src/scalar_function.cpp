#include "gammarod/scalar_function.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gammarod/errors.hpp"

namespace gammarod {

Jet3 Polynomial::eval(double x) const {
  Jet3 out{0.0, 0.0, 0.0, 0.0};
  // Horner on value and derivatives simultaneously.
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) {
    out[3] = out[3] * x + 3.0 * out[2];
    out[2] = out[2] * x + 2.0 * out[1];
    out[1] = out[1] * x + out[0];
    out[0] = out[0] * x + *it;
  }
  return out;
}

Jet3 TrigSeries::eval(double x) const {
  Jet3 out{0.0, 0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < amplitudes.size(); ++i) {
    const double a = amplitudes[i];
    const double f = frequencies[i];
    const double arg = f * x + (i < phases.size() ? phases[i] : 0.0);
    const double s = std::sin(arg);
    const double c = std::cos(arg);
    out[0] += a * s;
    out[1] += a * f * c;
    out[2] -= a * f * f * s;
    out[3] -= a * f * f * f * c;
  }
  return out;
}

namespace {

// Monomial coefficients on t in [0,1] from (y0, y0', y0'', y1, y1', y1'')
// expressed in t-derivatives.
const Eigen::Matrix<double, 6, 6>& quintic_hermite_inverse() {
  static const Eigen::Matrix<double, 6, 6> inv = [] {
    Eigen::Matrix<double, 6, 6> v;
    v << 1, 0, 0, 0, 0, 0,
         0, 1, 0, 0, 0, 0,
         0, 0, 2, 0, 0, 0,
         1, 1, 1, 1, 1, 1,
         0, 1, 2, 3, 4, 5,
         0, 0, 2, 6, 12, 20;
    return Eigen::Matrix<double, 6, 6>(v.inverse());
  }();
  return inv;
}

}  // namespace

QuinticSpline::QuinticSpline(std::vector<double> knots, std::vector<double> values,
                             double slope_left, double slope_right)
    : knots_(std::move(knots)) {
  const int n = static_cast<int>(knots_.size()) - 1;
  if (n < 1 || values.size() != knots_.size()) {
    throw ConfigError("spline needs at least two knots and one value per knot");
  }
  for (int i = 0; i < n; ++i) {
    if (!(knots_[i + 1] > knots_[i])) throw ConfigError("spline knots must be increasing");
  }
  const auto& hinv = quintic_hermite_inverse();
  // Unknowns: y'_0..y'_n, then y''_0..y''_n.
  const int m = 2 * (n + 1);
  Eigen::MatrixXd sys = Eigen::MatrixXd::Zero(m, m);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
  auto d1 = [](int i) { return i; };
  auto d2 = [n](int i) { return n + 1 + i; };

  // Third and fourth t-derivatives at t=0 and t=1 as rows acting on the
  // local data vector.
  Eigen::Matrix<double, 6, 1> r3_0, r3_1, r4_0, r4_1;
  r3_0 = 6.0 * hinv.row(3).transpose();
  r3_1 = (6.0 * hinv.row(3) + 24.0 * hinv.row(4) + 60.0 * hinv.row(5)).transpose();
  r4_0 = 24.0 * hinv.row(4).transpose();
  r4_1 = (24.0 * hinv.row(4) + 120.0 * hinv.row(5)).transpose();

  // Adds coef * (k-th x-derivative on interval i at end `at_one`) to row `row`.
  auto add_derivative = [&](int row, int i, const Eigen::Matrix<double, 6, 1>& r, int order,
                            double coef) {
    const double h = knots_[i + 1] - knots_[i];
    const double scale = coef / std::pow(h, order);
    // local data = (y_i, h y'_i, h^2 y''_i, y_{i+1}, h y'_{i+1}, h^2 y''_{i+1})
    rhs(row) -= scale * (r(0) * values[i] + r(3) * values[i + 1]);
    sys(row, d1(i)) += scale * r(1) * h;
    sys(row, d2(i)) += scale * r(2) * h * h;
    sys(row, d1(i + 1)) += scale * r(4) * h;
    sys(row, d2(i + 1)) += scale * r(5) * h * h;
  };

  int row = 0;
  sys(row, d1(0)) = 1.0;
  rhs(row++) = slope_left;
  sys(row, d1(n)) = 1.0;
  rhs(row++) = slope_right;
  add_derivative(row++, 0, r3_0, 3, 1.0);
  add_derivative(row++, n - 1, r3_1, 3, 1.0);
  for (int i = 1; i < n; ++i) {
    add_derivative(row, i - 1, r3_1, 3, 1.0);
    add_derivative(row, i, r3_0, 3, -1.0);
    ++row;
    add_derivative(row, i - 1, r4_1, 4, 1.0);
    add_derivative(row, i, r4_0, 4, -1.0);
    ++row;
  }
  const Eigen::VectorXd z = sys.fullPivLu().solve(rhs);

  coeffs_.resize(n);
  for (int i = 0; i < n; ++i) {
    const double h = knots_[i + 1] - knots_[i];
    Eigen::Matrix<double, 6, 1> data;
    data << values[i], h * z(d1(i)), h * h * z(d2(i)), values[i + 1], h * z(d1(i + 1)),
        h * h * z(d2(i + 1));
    const Eigen::Matrix<double, 6, 1> a = hinv * data;
    for (int k = 0; k < 6; ++k) coeffs_[i][k] = a(k);
  }
}

Jet3 QuinticSpline::eval(double x) const {
  const int n = static_cast<int>(coeffs_.size());
  auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
  int i = static_cast<int>(it - knots_.begin()) - 1;
  i = std::clamp(i, 0, n - 1);
  const double h = knots_[i + 1] - knots_[i];
  const double t = (x - knots_[i]) / h;
  const auto& a = coeffs_[i];
  Jet3 out{0.0, 0.0, 0.0, 0.0};
  for (int k = 5; k >= 0; --k) {
    out[3] = out[3] * t + 3.0 * out[2];
    out[2] = out[2] * t + 2.0 * out[1];
    out[1] = out[1] * t + out[0];
    out[0] = out[0] * t + a[k];
  }
  out[1] /= h;
  out[2] /= h * h;
  out[3] /= h * h * h;
  return out;
}

ScalarFunction ScalarFunction::trig(std::vector<double> amplitudes,
                                    std::vector<double> frequencies,
                                    std::vector<double> phases) {
  if (amplitudes.size() != frequencies.size() ||
      (!phases.empty() && phases.size() != amplitudes.size())) {
    throw ConfigError("trig: amplitude, frequency and phase lists must have equal length");
  }
  return ScalarFunction(TrigSeries{std::move(amplitudes), std::move(frequencies),
                                   std::move(phases)});
}

ScalarFunction ScalarFunction::spline(std::vector<double> knots, std::vector<double> values,
                                      double slope_left, double slope_right) {
  return ScalarFunction(
      QuinticSpline(std::move(knots), std::move(values), slope_left, slope_right));
}

Jet3 ScalarFunction::jet(double x) const {
  return std::visit([x](const auto& f) { return f.eval(x); }, impl_);
}

bool ScalarFunction::is_zero() const {
  if (const auto* p = std::get_if<Polynomial>(&impl_)) {
    return std::all_of(p->coeffs.begin(), p->coeffs.end(), [](double c) { return c == 0.0; });
  }
  if (const auto* t = std::get_if<TrigSeries>(&impl_)) {
    return std::all_of(t->amplitudes.begin(), t->amplitudes.end(),
                       [](double c) { return c == 0.0; });
  }
  return false;
}

}  // namespace gammarod
