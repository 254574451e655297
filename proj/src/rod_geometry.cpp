#include "gammarod/rod_geometry.hpp"

#include <Eigen/Dense>
#include <array>
#include <cmath>

#include "gammarod/dual.hpp"
#include "gammarod/errors.hpp"

namespace gammarod {

Curve::Curve(double length, ScalarFunction theta2, ScalarFunction theta3,
             std::optional<ScalarFunction> frame_angle)
    : L_(length), th2_(std::move(theta2)), th3_(std::move(theta3)), angle_(std::move(frame_angle)) {
  if (!(L_ > 0)) throw ConfigError("curve length must be positive");
}

namespace {

using DVec = std::array<Dual, 3>;

Dual dot(const DVec& a, const DVec& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

DVec normalized(const DVec& a) {
  const Dual n = sqrt(dot(a, a));
  return {a[0] / n, a[1] / n, a[2] / n};
}

DVec cross(const DVec& a, const DVec& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

// (p2, p3) with x1-derivatives.
std::array<Dual, 2> direction(const Curve& curve, double x1) {
  if (curve.has_user_frame()) {
    const Jet3 a = curve.frame_angle()->jet(x1);
    const Dual psi(a[0], a[1]);
    return {cos(psi), sin(psi)};
  }
  const Jet3 j2 = curve.theta2().jet(x1);
  const Jet3 j3 = curve.theta3().jet(x1);
  const Dual k2(j2[2], j2[3]), k3(j3[2], j3[3]);
  const Dual norm = sqrt(k2 * k2 + k3 * k3);
  if (!(norm.v > 1e-12)) {
    throw DegenerateCurvature("centerline curvature vanishes at x1 = " + std::to_string(x1) +
                              "; supply a frame angle");
  }
  return {k2 / norm, k3 / norm};
}

Vec3 value(const DVec& a) { return {a[0].v, a[1].v, a[2].v}; }
Vec3 deriv(const DVec& a) { return {a[0].d, a[1].d, a[2].d}; }

}  // namespace

FrameData frame_data(const Curve& curve, double x1) {
  const auto d = direction(curve, x1);
  FrameData f;
  f.p2 = d[0].v;
  f.p3 = d[1].v;
  f.dp2 = d[0].d;
  f.dp3 = d[1].d;
  f.p = f.p2 * f.dp3 - f.dp2 * f.p3;
  f.Re << 1, 0, 0, 0, f.p2, -f.p3, 0, f.p3, f.p2;
  return f;
}

FrenetFrame exact_frenet(const Curve& curve, double h, double x1) {
  const Jet3 j2 = curve.theta2().jet(x1);
  const Jet3 j3 = curve.theta3().jet(x1);
  const DVec tangent{Dual(1.0), Dual(h * j2[1], h * j2[2]), Dual(h * j3[1], h * j3[2])};
  const DVec t = normalized(tangent);
  const auto p = direction(curve, x1);
  const DVec d{Dual(0.0), p[0], p[1]};
  const Dual dt = dot(d, t);
  const DVec n = normalized({d[0] - dt * t[0], d[1] - dt * t[1], d[2] - dt * t[2]});
  const DVec b = cross(t, n);
  return {value(t), value(n), value(b), deriv(t), deriv(n), deriv(b)};
}

Vec3 theta_map(const Curve& curve, double h, const Vec3& x) {
  const FrenetFrame f = exact_frenet(curve, h, x(0));
  return Vec3(x(0), h * curve.theta2()(x(0)), h * curve.theta3()(x(0))) + x(1) * f.n + x(2) * f.b;
}

ThetaJacobian theta_jacobian(const Curve& curve, double h, const Vec3& x) {
  const FrenetFrame f = exact_frenet(curve, h, x(0));
  const Vec3 u(1.0, h * curve.theta2().derivative(x(0), 1), h * curve.theta3().derivative(x(0), 1));
  ThetaJacobian out;
  out.J.col(0) = u + x(1) * f.dn + x(2) * f.db;
  out.J.col(1) = f.n;
  out.J.col(2) = f.b;
  out.det = out.J.determinant();
  if (!(out.det > 0)) {
    throw GeometryRegimeError("tube map is not invertible: thickness too large");
  }
  return out;
}

Mat3 theta_jacobian_expansion(const Curve& curve, double h, const Vec3& x) {
  const FrameData fd = frame_data(curve, x(0));
  const double a2 = curve.theta2().derivative(x(0), 1);
  const double a3 = curve.theta3().derivative(x(0), 1);
  Mat3 C, D = Mat3::Zero(), E = Mat3::Zero();
  C << 0, -(a2 * fd.p2 + a3 * fd.p3), -(a3 * fd.p2 - a2 * fd.p3),
       a2, 0, 0,
       a3, 0, 0;
  D.col(0) = Vec3(0, fd.dp2, fd.dp3);
  E.col(0) = Vec3(0, -fd.dp3, fd.dp2);
  return fd.Re + h * C + x(1) * D + x(2) * E;
}

double loglog_slope(const std::vector<double>& h, const std::vector<double>& err) {
  const std::size_t n = h.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lx = std::log(h[i]);
    const double ly = std::log(err[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

ExpansionReport expansion_report(const Curve& curve, const std::vector<double>& hs,
                                 int x1_samples, int section_samples) {
  ExpansionReport rep;
  rep.h = hs;
  const double L = curve.length();
  for (double h : hs) {
    double et = 0, en = 0, eb = 0, ej = 0, ei = 0, ed = 0;
    for (int i = 0; i < x1_samples; ++i) {
      const double x1 = L * i / (x1_samples - 1);
      const FrenetFrame f = exact_frenet(curve, h, x1);
      const FrameData fd = frame_data(curve, x1);
      const double a2 = curve.theta2().derivative(x1, 1);
      const double a3 = curve.theta3().derivative(x1, 1);
      const Vec3 t1(1.0, h * a2, h * a3);
      const Vec3 n1(-h * (a2 * fd.p2 + a3 * fd.p3), fd.p2, fd.p3);
      const Vec3 b1(h * (a2 * fd.p3 - a3 * fd.p2), -fd.p3, fd.p2);
      et = std::max(et, (f.t - t1).norm());
      en = std::max(en, (f.n - n1).norm());
      eb = std::max(eb, (f.b - b1).norm());
      for (int a = 0; a < section_samples; ++a) {
        for (int b = 0; b < section_samples; ++b) {
          const double s2 = section_samples > 1 ? -0.5 + double(a) / (section_samples - 1) : 0.0;
          const double s3 = section_samples > 1 ? -0.5 + double(b) / (section_samples - 1) : 0.0;
          const Vec3 x(x1, h * s2, h * s3);
          const ThetaJacobian tj = theta_jacobian(curve, h, x);
          ej = std::max(ej, (tj.J - theta_jacobian_expansion(curve, h, x)).norm());
          ei = std::max(ei, (tj.J.inverse() - fd.Re.transpose()).norm());
          ed = std::max(ed, std::abs(tj.det - 1.0));
        }
      }
    }
    rep.err_t.push_back(et);
    rep.err_n.push_back(en);
    rep.err_b.push_back(eb);
    rep.err_jacobian.push_back(ej);
    rep.err_inverse.push_back(ei);
    rep.det_deviation.push_back(ed);
    rep.det_constant = std::max(rep.det_constant, ed / h);
  }
  if (hs.size() >= 2) {
    rep.slope_t = loglog_slope(hs, rep.err_t);
    rep.slope_n = loglog_slope(hs, rep.err_n);
    rep.slope_b = loglog_slope(hs, rep.err_b);
    rep.slope_jacobian = loglog_slope(hs, rep.err_jacobian);
    rep.slope_inverse = loglog_slope(hs, rep.err_inverse);
  }
  return rep;
}

}  // namespace gammarod
