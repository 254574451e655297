#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "gammarod/cell_problem.hpp"
#include "gammarod/limit_energy.hpp"
#include "gammarod/mesh.hpp"
#include "gammarod/parallel.hpp"

using namespace gammarod;

namespace {

Curve arch() {
  return Curve(2.0, ScalarFunction::trig({0.5}, {1.3}, {0.2}),
               ScalarFunction::polynomial({0, 0.1, 0.3}));
}

StiffnessField diag_stiffness(double a, double b2, double b3, double c) {
  return [=](double) { return Eigen::Vector4d(a, b2, b3, c).asDiagonal().toDenseMatrix(); };
}

StiffnessField full_stiffness() {
  return [](double x) {
    Eigen::Matrix4d M;
    M << 3.0, 0.1, -0.2, 0.05,
         0.1, 1.0 + 0.3 * x, 0.1, 0.0,
         -0.2, 0.1, 0.8, 0.02,
         0.05, 0.0, 0.02, 0.5;
    return M;
  };
}

RodState random_state(int n, std::mt19937_64& rng, double amp) {
  std::uniform_real_distribution<double> d(-amp, amp);
  RodState s(n);
  for (int i = 0; i < s.coeffs().size(); ++i) s.coeffs()(i) = d(rng);
  return s;
}

}  // namespace

TEST(LimitEnergy, StrainMeasures) {
  FieldSample f;
  f.du = 0.3;
  f.dv2 = 0.2;
  f.dv3 = -0.1;
  f.ddv2 = 1.5;
  f.ddv3 = -0.5;
  f.dw = 0.7;
  const GeneralizedStrain e = strain_measures(f, 0.4, -0.6);
  EXPECT_NEAR(e.t, 0.3 + 0.4 * 0.2 + 0.6 * 0.1 + 0.5 * (0.04 + 0.01), 1e-15);
  EXPECT_EQ(e.k2, 1.5);
  EXPECT_EQ(e.k3, -0.5);
  EXPECT_EQ(e.twist, 0.7);
}

TEST(LimitEnergy, HermiteInterpolationReproducesCubics) {
  const auto v = [](double x) { return Jet3{x * x * x - x, 3 * x * x - 1, 6 * x, 6}; };
  const RodState s = RodState::interpolate(
      5, 2.0, [](double x) { return 0.5 * x; }, v, v, [](double x) { return 1 - x; });
  for (double x : {0.0, 0.13, 0.77, 1.5, 2.0}) {
    const FieldSample f = sample(s, 2.0, x);
    EXPECT_NEAR(f.v2, x * x * x - x, 1e-13);
    EXPECT_NEAR(f.dv2, 3 * x * x - 1, 1e-13);
    EXPECT_NEAR(f.ddv3, 6 * x, 1e-12);
    EXPECT_NEAR(f.u, 0.5 * x, 1e-14);
    EXPECT_NEAR(f.dw, -1.0, 1e-14);
  }
}

TEST(LimitEnergy, EnergyMatchesIntegral) {
  // Straight rod: I0 = 1/2 int A (a + b^2 x^2 / 2)^2 + B2 b^2 + C c^2.
  const Curve straight(1.0, ScalarFunction(), ScalarFunction(), ScalarFunction::constant(0.0));
  const double A = 2.0, B2 = 0.5, C = 0.25, a = 0.01, b = 0.3, c = 0.2;
  const DiscreteModel model(straight, 8, diag_stiffness(A, B2, 0.1, C));
  const RodState s = RodState::interpolate(
      8, 1.0, [=](double x) { return a * x; },
      [=](double x) { return Jet3{0.5 * b * x * x, b * x, b, 0}; },
      [](double) { return Jet3{0, 0, 0, 0}; }, [=](double x) { return c * x; });
  // Composite Simpson on a fine grid.
  const int n = 2000;
  double integral = 0;
  for (int i = 0; i <= n; ++i) {
    const double x = static_cast<double>(i) / n;
    const double w = (i == 0 || i == n) ? 1 : (i % 2 ? 4 : 2);
    const double t = a + 0.5 * b * b * x * x;
    integral += w * 0.5 * (A * t * t + B2 * b * b + C * c * c);
  }
  integral /= 3.0 * n;
  EXPECT_NEAR(model.energy(s), integral, 1e-13);
}

TEST(LimitEnergy, GradientAndHessianMatchFiniteDifferences) {
  const DiscreteModel model(arch(), 4, full_stiffness());
  std::mt19937_64 rng(9);
  const RodState s = random_state(4, rng, 0.2);
  const Eigen::VectorXd g = model.gradient(s);
  const Eigen::MatrixXd H(model.hessian(s));
  RodState w = s;
  const double e = 1e-6;
  Eigen::VectorXd gfd(g.size());
  Eigen::MatrixXd Hfd(H.rows(), H.cols());
  for (int i = 0; i < g.size(); ++i) {
    w.coeffs()(i) = s.coeffs()(i) + e;
    const double ep = model.energy(w);
    const Eigen::VectorXd gp = model.gradient(w);
    w.coeffs()(i) = s.coeffs()(i) - e;
    const double em = model.energy(w);
    const Eigen::VectorXd gm = model.gradient(w);
    w.coeffs()(i) = s.coeffs()(i);
    gfd(i) = (ep - em) / (2 * e);
    Hfd.col(i) = (gp - gm) / (2 * e);
  }
  EXPECT_LT((gfd - g).norm(), 1e-7 * g.norm());
  EXPECT_LT((Hfd - H).norm(), 1e-6 * H.norm());
  EXPECT_LT((H - H.transpose()).cwiseAbs().maxCoeff(), 1e-14 * H.cwiseAbs().maxCoeff());
}

TEST(LimitEnergy, LoadGradientIsMinusLoadWork) {
  const DiscreteModel model(arch(), 6, full_stiffness());
  LoadCase loads{ScalarFunction::polynomial({0.2, -0.1}), ScalarFunction::trig({0.3}, {2.0})};
  std::mt19937_64 rng(2);
  const RodState s = random_state(6, rng, 0.5);
  EXPECT_NEAR(model.load_gradient(loads).dot(s.coeffs()), -model.load_work(s, loads), 1e-14);
}

TEST(LimitEnergy, GaugeFamilyLeavesStrainsAndEnergyInvariant) {
  const Curve c = arch();
  const DiscreteModel model(c, 16, full_stiffness());
  const auto base = [&c](double x) {
    FieldSample f;
    f.u = 0.1 * std::sin(x);
    f.du = 0.1 * std::cos(x);
    f.v2 = 0.2 * x * x;
    f.dv2 = 0.4 * x;
    f.ddv2 = 0.4;
    f.v3 = -0.1 * x * x * x;
    f.dv3 = -0.3 * x * x;
    f.ddv3 = -0.6 * x;
    f.w = 0.05 * x;
    f.dw = 0.05;
    (void)c;
    return f;
  };
  const double i0 = model.field_energy(base);
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> d(-1, 1);
  for (int k = 0; k < 20; ++k) {
    const GaugeShift g{d(rng), d(rng), d(rng), d(rng), d(rng), d(rng)};
    const double i1 = model.field_energy([&](double x) { return g.apply(base(x), c, x); });
    EXPECT_NEAR(i1, i0, 1e-12 * (1 + i0));
    const double x = 0.9;
    const Jet3 t2 = c.theta2().jet(x), t3 = c.theta3().jet(x);
    const GeneralizedStrain e0 = strain_measures(base(x), t2[1], t3[1]);
    const GeneralizedStrain e1 = strain_measures(g.apply(base(x), c, x), t2[1], t3[1]);
    EXPECT_NEAR(e1.t, e0.t, 1e-13);
    EXPECT_NEAR(e1.k2, e0.k2, 1e-13);
    EXPECT_NEAR(e1.k3, e0.k3, 1e-13);
    EXPECT_NEAR(e1.twist, e0.twist, 1e-13);
  }
}

TEST(LimitEnergy, SerialAndParallelAreBitIdentical) {
  set_num_threads(4);
  const DiscreteModel model(arch(), 37, full_stiffness());
  std::mt19937_64 rng(23);
  const RodState s = random_state(37, rng, 0.3);
  EXPECT_EQ(model.energy(s, Exec::Serial), model.energy(s, Exec::Parallel));
  const Eigen::VectorXd gs = model.gradient(s, Exec::Serial), gp = model.gradient(s, Exec::Parallel);
  EXPECT_EQ((gs - gp).cwiseAbs().maxCoeff(), 0.0);
  const Eigen::SparseMatrix<double> hs = model.hessian(s, Exec::Serial);
  const Eigen::SparseMatrix<double> hp = model.hessian(s, Exec::Parallel);
  EXPECT_EQ(Eigen::MatrixXd(hs - hp).cwiseAbs().maxCoeff(), 0.0);
}

TEST(LimitEnergy, CellStiffnessOnGradedSection) {
  const TriMesh m = triangulate(PolygonSection::rectangle(1, 1), 0.15);
  const MaterialField mat({1.0, 1.0}, 2.0, {0.5, 0.4, -0.3});
  const DiscreteModel model(arch(), 4, cell_stiffness(m, mat, arch()), 2);
  EXPECT_GT(model.min_stiffness_eigenvalue(), 0.0);
  // At x1 = 0 the cell result equals a direct condensation.
  const FrameData f = frame_data(arch(), model.quad_x(0, 0));
  const double x1 = model.quad_x(0, 0);
  const CondensedStiffness M = condense_stiffness(
      m, [&](const Vec2& x) { return mat.at(x1, x.x(), x.y()); }, Vec2(f.p2, f.p3));
  EXPECT_LT((M.M - model.stiffness(0, 0)).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(LimitEnergy, StrainExamples) {
  FieldSample f;
  EXPECT_EQ(strain_measures(f, 0.3, 0.2).vector().norm(), 0.0);
  f.du = 1.0;
  EXPECT_EQ(strain_measures(f, 0.0, 0.0).t, 1.0);
  FieldSample g;
  g.dv2 = 1.0;
  EXPECT_EQ(strain_measures(g, 0.0, 0.0).t, 0.5);
}

TEST(LimitEnergy, LoadExamples) {
  const Curve straight(1.0, ScalarFunction(), ScalarFunction(), ScalarFunction::constant(0.0));
  const DiscreteModel model(straight, 4, diag_stiffness(1, 1, 1, 1));
  const LoadCase loads{ScalarFunction::constant(1.0), ScalarFunction()};
  RodState s(4);
  EXPECT_EQ(model.total_energy(s, loads), 0.0);
  EXPECT_EQ(model.gradient(s).norm(), 0.0);
  for (int n = 0; n < s.nodes(); ++n) s.at(n, RodState::V2) = 1.0;
  EXPECT_NEAR(model.total_energy(s, loads), -1.0, 1e-14);
  EXPECT_NEAR(model.total_energy(s, {}), model.energy(s), 0.0);
}

TEST(LimitEnergy, UniformStretchWithSectionStiffness) {
  const Curve straight(2.0, ScalarFunction(), ScalarFunction(), ScalarFunction::constant(0.0));
  const PolygonSection sec = PolygonSection::rectangle(1.0, 0.5);
  const MaterialField mat({1.0, 1.0});
  const DiscreteModel model(straight, 5, closed_form_stiffness(compute_moments(sec), 0.1, mat, straight));
  const double eps = 0.01;
  const RodState s = RodState::interpolate(
      5, 2.0, [=](double x) { return eps * x; }, [](double) { return Jet3{0, 0, 0, 0}; },
      [](double) { return Jet3{0, 0, 0, 0}; }, [](double) { return 0.0; });
  EXPECT_NEAR(model.energy(s), 0.5 * 2.5 * 0.5 * eps * eps * 2.0, 1e-16);
}
