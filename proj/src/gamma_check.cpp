#include "gammarod/gamma_check.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "gammarod/dual.hpp"
#include "gammarod/errors.hpp"
#include "gammarod/quadrature.hpp"

namespace gammarod {

namespace {

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

Dual ipow(const Dual& x, int n) {
  Dual r(1.0);
  for (int i = 0; i < n; ++i) r *= x;
  return r;
}

double ipow(double x, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= x;
  return r;
}

Mat3 sym(const Mat3& m) { return 0.5 * (m + m.transpose()); }

}  // namespace

WarpField::WarpField(std::vector<WarpTerm> terms, bool project, const PolygonSection& section,
                     const Curve& curve)
    : terms_(std::move(terms)), project_(project), curve_(std::make_shared<Curve>(curve)) {
  int deg = 0;
  for (const auto& t : terms_) {
    if (t.component < 0 || t.component > 2 || t.a < 0 || t.b < 0) {
      throw ConfigError("warp term needs component in 1..3 and nonnegative powers");
    }
    deg = std::max(deg, t.a + t.b + 1);
  }
  moments_ = Eigen::MatrixXd::Zero(deg + 1, deg + 1);
  for (int i = 0; i <= deg; ++i) {
    for (int j = 0; i + j <= deg; ++j) moments_(i, j) = monomial_integral(section, i, j);
  }
  area_ = moments_(0, 0);
  polar_ = deg >= 2 ? moments_(2, 0) + moments_(0, 2)
                    : monomial_integral(section, 2, 0) + monomial_integral(section, 0, 2);
}

WarpField::Eval WarpField::eval(double x1, const Vec2& x) const {
  Eval out;
  if (terms_.empty()) return out;
  const FrameData fd = frame_data(*curve_, x1);
  const Dual p2(fd.p2, fd.dp2), p3(fd.p3, fd.dp3);
  const Dual y2 = p2 * x.x() - p3 * x.y();
  const Dual y3 = p3 * x.x() + p2 * x.y();

  // int over the rotated section of x2'^a x3'^b.
  auto rot_moment = [&](int a, int b) {
    Dual s(0.0);
    for (int k = 0; k <= a; ++k) {
      for (int l = 0; l <= b; ++l) {
        const Dual c = binomial(a, k) * binomial(b, l) * ipow(p2, a - k + l) * ipow(-p3, k) *
                       ipow(p3, b - l);
        s += c * moments_(a - k + b - l, k + l);
      }
    }
    return s;
  };

  std::array<Dual, 3> eta{Dual(0.0), Dual(0.0), Dual(0.0)};
  std::array<Dual, 3> mean{Dual(0.0), Dual(0.0), Dual(0.0)};
  Dual moment(0.0);
  for (const auto& t : terms_) {
    const Jet3 cj = t.coeff.jet(x1);
    const Dual c(cj[0], cj[1]);
    eta[t.component] += c * ipow(y2, t.a) * ipow(y3, t.b);
    const double d2 = t.a > 0 ? t.a * ipow(y2.v, t.a - 1) * ipow(y3.v, t.b) : 0.0;
    const double d3 = t.b > 0 ? t.b * ipow(y2.v, t.a) * ipow(y3.v, t.b - 1) : 0.0;
    out.d2p(t.component) += c.v * d2;
    out.d3p(t.component) += c.v * d3;
    if (project_) {
      mean[t.component] += c * rot_moment(t.a, t.b) / area_;
      if (t.component == 1) moment += c * rot_moment(t.a, t.b + 1);
      if (t.component == 2) moment -= c * rot_moment(t.a + 1, t.b);
    }
  }
  if (project_) {
    const Dual r = moment / polar_;
    for (int i = 0; i < 3; ++i) eta[i] -= mean[i];
    eta[1] -= r * y3;
    eta[2] += r * y2;
    out.d2p(2) += r.v;
    out.d3p(1) -= r.v;
  }
  for (int i = 0; i < 3; ++i) {
    out.eta(i) = eta[i].v;
    out.d1(i) = eta[i].d;
  }
  return out;
}

namespace {

struct StateJets {
  Jet3 u, v2, v3, w, th2, th3;
};

StateJets jets(const SmoothState& s, const Curve& c, double x1) {
  return {s.u.jet(x1), s.v2.jet(x1), s.v3.jet(x1), s.w.jet(x1), c.theta2().jet(x1),
          c.theta3().jet(x1)};
}

Mat3 strain_from(const StateJets& j, const FrameData& fd, const WarpField::Eval& we,
                 const Vec2& x) {
  const double a2 = j.th2[1], a3 = j.th3[1];
  const double dv2 = j.v2[1], dv3 = j.v3[1], w = j.w[0];
  Mat3 J, A, K;
  J << j.u[1] + dv2 * a2 + dv3 * a3, 0, 0,
       w * a3, dv2 * a2, dv2 * a3,
       -w * a2, dv3 * a2, dv3 * a3;
  A << 0, -dv2, -dv3, dv2, 0, -w, dv3, w, 0;
  const double y2 = fd.p2 * x.x() - fd.p3 * x.y();
  const double y3 = fd.p3 * x.x() + fd.p2 * x.y();
  K.col(0) = Vec3(-y2 * j.v2[2] - y3 * j.v3[2], -y3 * j.w[1], y2 * j.w[1]);
  K.col(1) = we.d2p;
  K.col(2) = we.d3p;
  return sym(J - 0.5 * A * A + K);
}

struct SectionPoint {
  Vec2 x;
  double w;
};

std::vector<SectionPoint> section_points(const TriMesh& mesh) {
  const auto& rule = triangle_rule3();
  std::vector<SectionPoint> pts;
  pts.reserve(3 * mesh.triangles.size());
  for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) {
    const auto& tri = mesh.triangles[t];
    const double area = mesh.triangle_area(t);
    for (int q = 0; q < 3; ++q) {
      const Vec2 x = rule.bary[q][0] * mesh.nodes[tri[0]] + rule.bary[q][1] * mesh.nodes[tri[1]] +
                     rule.bary[q][2] * mesh.nodes[tri[2]];
      pts.push_back({x, area * rule.weights[q]});
    }
  }
  return pts;
}

struct X1Point {
  double x, w;
};

std::vector<X1Point> x1_points(double L, const GammaQuadrature& quad) {
  const Rule1D rule = gauss_legendre(quad.x1_order);
  const double le = L / quad.x1_elements;
  std::vector<X1Point> pts;
  for (int e = 0; e < quad.x1_elements; ++e) {
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      pts.push_back({(e + rule.points[q]) * le, rule.weights[q] * le});
    }
  }
  return pts;
}

// Deterministic parallel sum over x1 points.
template <class F>
double sum_over_x1(const std::vector<X1Point>& xs, Exec exec, F&& per_point) {
  std::vector<double> part(xs.size(), 0.0);
  std::exception_ptr err;
#pragma omp parallel for schedule(dynamic) if (exec == Exec::Parallel)
  for (int k = 0; k < static_cast<int>(xs.size()); ++k) {
    try {
      part[k] = xs[k].w * per_point(xs[k].x);
    } catch (...) {
#pragma omp critical
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);
  double s = 0.0;
  for (double v : part) s += v;
  return s;
}

}  // namespace

Mat3 limit_strain(const SmoothState& s, const Curve& curve, const WarpField& warp, double x1,
                  const Vec2& x) {
  return strain_from(jets(s, curve, x1), frame_data(curve, x1), warp.eval(x1, x), x);
}

double recovery_energy(const Curve& curve, const MaterialField& mat, const SmoothState& s,
                       const WarpField& warp, double h, const TriMesh& mesh,
                       const GammaQuadrature& quad, Exec exec) {
  if (!(h > 0)) throw ConfigError("thickness must be positive");
  const auto pts = section_points(mesh);
  const auto xs = x1_points(curve.length(), quad);
  const double h2 = h * h, h3 = h2 * h, h4 = h2 * h2;
  return sum_over_x1(xs, exec, [&](double x1) {
    const StateJets j = jets(s, curve, x1);
    const FrameData fd = frame_data(curve, x1);
    const FrenetFrame fr = exact_frenet(curve, h, x1);
    const Vec3 uh(1.0, h * j.th2[1], h * j.th3[1]);
    const double p2 = fd.p2, p3 = fd.p3;
    const double dv2 = j.v2[1], dv3 = j.v3[1], w = j.w[0], dw = j.w[1];
    double acc = 0.0;
    for (const auto& sp : pts) {
      const double x2 = sp.x.x(), x3 = sp.x.y();
      const double y2 = p2 * x2 - p3 * x3, y3 = p3 * x2 + p2 * x3;
      const double dy2 = fd.dp2 * x2 - fd.dp3 * x3, dy3 = fd.dp3 * x2 + fd.dp2 * x3;
      const Vec3 d1rot(-j.v2[2] * y2 - j.v3[2] * y3 - dv2 * dy2 - dv3 * dy3,
                       -dw * y3 - w * dy3, dw * y2 + w * dy2);
      const Vec3 d2rot(-dv2 * p2 - dv3 * p3, -w * p3, w * p2);
      const Vec3 d3rot(dv2 * p3 - dv3 * p2, -w * p2, -w * p3);
      const WarpField::Eval we = warp.eval(x1, sp.x);
      const Vec3 d2eta = p2 * we.d2p + p3 * we.d3p;
      const Vec3 d3eta = -p3 * we.d2p + p2 * we.d3p;

      Mat3 D;
      D.col(0) = Vec3(h2 * j.u[1], h * dv2, h * dv3) + h2 * d1rot + h3 * we.d1;
      D.col(1) = h * d2rot + h2 * d2eta;
      D.col(2) = h * d3rot + h2 * d3eta;
      Mat3 T;
      T.col(0) = uh + h * x2 * fr.dn + h * x3 * fr.db;
      T.col(1) = fr.n;
      T.col(2) = fr.b;
      const Mat3 F = Mat3::Identity() + D * T.inverse();
      if (!(F.determinant() > 0.5)) {
        throw GeometryRegimeError("recovery deformation degenerates at h = " +
                                  std::to_string(h));
      }
      acc += sp.w * svk_energy(mat.at(x1, x2, x3), F);
    }
    return acc / h4;
  });
}

double limit_density(const SmoothState& s, const Curve& curve, const MaterialField& mat,
                     const WarpField& warp, const TriMesh& mesh, const GammaQuadrature& quad,
                     Exec exec) {
  const auto pts = section_points(mesh);
  const auto xs = x1_points(curve.length(), quad);
  return 0.5 * sum_over_x1(xs, exec, [&](double x1) {
    const StateJets j = jets(s, curve, x1);
    const FrameData fd = frame_data(curve, x1);
    double acc = 0.0;
    for (const auto& sp : pts) {
      const Mat3 G = strain_from(j, fd, warp.eval(x1, sp.x), sp.x);
      acc += sp.w * q3_apply(mat.at(x1, sp.x.x(), sp.x.y()), G);
    }
    return acc;
  });
}

namespace {

GeneralizedStrain strain_of(const StateJets& j) {
  FieldSample f;
  f.du = j.u[1];
  f.dv2 = j.v2[1];
  f.ddv2 = j.v2[2];
  f.dv3 = j.v3[1];
  f.ddv3 = j.v3[2];
  f.dw = j.w[1];
  return strain_measures(f, j.th2[1], j.th3[1]);
}

}  // namespace

double limit_density_cell_optimal(const SmoothState& s, const Curve& curve,
                                  const MaterialField& mat, const TriMesh& mesh,
                                  const GammaQuadrature& quad, Exec exec) {
  const auto xs = x1_points(curve.length(), quad);
  return 0.5 * sum_over_x1(xs, exec, [&](double x1) {
    const StateJets j = jets(s, curve, x1);
    const FrameData fd = frame_data(curve, x1);
    const CellProblem cell(mesh, [&](const Vec2& x) { return mat.at(x1, x.x(), x.y()); },
                           Vec2(fd.p2, fd.p3));
    // The constant part is sym(J - A^2/2); its (1,1) entry is t.
    AffineField g = AffineField::from_strain(strain_of(j));
    g.c0 = strain_from(j, fd, WarpField::Eval{}, Vec2::Zero());
    return cell.min_energy(g);
  });
}

double smooth_limit_energy(const SmoothState& s, const Curve& curve, const MaterialField& mat,
                           const TriMesh& mesh, const GammaQuadrature& quad, Exec exec) {
  const auto xs = x1_points(curve.length(), quad);
  const StiffnessField M = cell_stiffness(mesh, mat, curve);
  return 0.5 * sum_over_x1(xs, exec, [&](double x1) {
    const Eigen::Vector4d e = strain_of(jets(s, curve, x1)).vector();
    return e.dot(M(x1) * e);
  });
}

double absorption_check(const CellProblem& cell, const CondensedStiffness& M, const Mat3& S,
                        const GeneralizedStrain& e) {
  AffineField g = AffineField::from_strain(e);
  g.c0 += S;
  return cell.min_energy(g) - M.energy_density(e.vector());
}

GammaTable gamma_table(const Curve& curve, const MaterialField& mat, const SmoothState& s,
                       const WarpField& warp, const std::vector<double>& hs, const TriMesh& mesh,
                       const GammaQuadrature& quad, Exec exec) {
  GammaTable table;
  const double elim = limit_density(s, curve, mat, warp, mesh, quad, exec);
  std::vector<double> hv, dv;
  for (double h : hs) {
    const double e3 = recovery_energy(curve, mat, s, warp, h, mesh, quad, exec);
    table.rows.push_back({h, e3, elim, std::abs(e3 - elim)});
    hv.push_back(h);
    dv.push_back(std::abs(e3 - elim));
  }
  if (hv.size() >= 2) table.slope = loglog_slope(hv, dv);
  return table;
}

}  // namespace gammarod
