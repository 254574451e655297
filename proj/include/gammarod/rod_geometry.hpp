#pragma once

#include <Eigen/Core>
#include <optional>
#include <vector>

#include "gammarod/material.hpp"
#include "gammarod/scalar_function.hpp"

namespace gammarod {

using Vec3 = Eigen::Vector3d;

/// Centerline x1 -> (x1, h theta2, h theta3) on (0, L). The section frame
/// follows the curvature direction theta''/|theta''| unless an angle
/// function psi is given, in which case (p2, p3) = (cos psi, sin psi).
class Curve {
 public:
  Curve(double length, ScalarFunction theta2, ScalarFunction theta3,
        std::optional<ScalarFunction> frame_angle = std::nullopt);

  double length() const { return L_; }
  const ScalarFunction& theta2() const { return th2_; }
  const ScalarFunction& theta3() const { return th3_; }
  bool has_user_frame() const { return angle_.has_value(); }
  const std::optional<ScalarFunction>& frame_angle() const { return angle_; }

 private:
  double L_;
  ScalarFunction th2_, th3_;
  std::optional<ScalarFunction> angle_;
};

struct FrameData {
  double p2 = 1.0, p3 = 0.0;
  double dp2 = 0.0, dp3 = 0.0;
  double p = 0.0;  // p2 p3' - p2' p3
  Mat3 Re = Mat3::Identity();
};

FrameData frame_data(const Curve& curve, double x1);

struct FrenetFrame {
  Vec3 t, n, b;
  Vec3 dt, dn, db;  // x1-derivatives
};

/// Orthonormal frame of the scaled curve; with curvature-driven (p2, p3)
/// this is the Frenet trihedron.
FrenetFrame exact_frenet(const Curve& curve, double h, double x1);

/// Theta^h at (x1, x2^h, x3^h).
Vec3 theta_map(const Curve& curve, double h, const Vec3& x);

struct ThetaJacobian {
  Mat3 J;
  double det;
};

/// Exact (u^h + x2 n' + x3 b' | n | b); throws GeometryRegimeError if det <= 0.
ThetaJacobian theta_jacobian(const Curve& curve, double h, const Vec3& x);

/// First-order expansion R_e + h C + x2^h D + x3^h E.
Mat3 theta_jacobian_expansion(const Curve& curve, double h, const Vec3& x);

struct ExpansionReport {
  std::vector<double> h;
  std::vector<double> err_t, err_n, err_b, err_jacobian, err_inverse, det_deviation;
  double slope_t = 0, slope_n = 0, slope_b = 0, slope_jacobian = 0, slope_inverse = 0;
  double det_constant = 0;  // max |det - 1| / h
};

/// Max residuals over a sample grid of x1 in [0, L] and section points in
/// [-1/2, 1/2]^2, with least-squares log-log slopes.
ExpansionReport expansion_report(const Curve& curve, const std::vector<double>& hs,
                                 int x1_samples = 41, int section_samples = 5);

/// Least-squares slope of log(err) against log(h).
double loglog_slope(const std::vector<double>& h, const std::vector<double>& err);

}  // namespace gammarod
