#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "gammarod/cell_problem.hpp"
#include "gammarod/errors.hpp"

using namespace gammarod;

namespace {

// Saint-Venant series for a w x d rectangle, w <= d.
double rectangle_torsion(double w, double d) {
  double s = 0;
  for (int n = 1; n < 200; n += 2) s += std::tanh(n * M_PI * d / (2 * w)) / std::pow(n, 5);
  return w * w * w * d / 3.0 * (1 - 192.0 / std::pow(M_PI, 5) * (w / d) * s);
}

AffineField random_affine(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(-1, 1);
  AffineField g;
  for (int i = 0; i < 9; ++i) {
    g.c0(i / 3, i % 3) = d(rng);
    g.c2(i / 3, i % 3) = d(rng);
    g.c3(i / 3, i % 3) = d(rng);
  }
  return g;
}

}  // namespace

TEST(Torsion, Rectangle) {
  const TriMesh m = triangulate(PolygonSection::rectangle(1.0, 2.0), 0.04);
  EXPECT_NEAR(solve_torsion(m).tau / rectangle_torsion(1.0, 2.0), 1.0, 5e-3);
}

TEST(Torsion, EllipseAndDisk) {
  const TriMesh e = triangulate(PolygonSection::ellipse(1.0, 0.5, 256), 0.04);
  EXPECT_NEAR(solve_torsion(e).tau / (M_PI * 0.125 / 1.25), 1.0, 5e-3);
  const TriMesh d = triangulate(PolygonSection::disk(1.0, 256), 0.06);
  EXPECT_NEAR(solve_torsion(d).tau / (M_PI / 2), 1.0, 5e-3);
}

TEST(Torsion, WarpingFunctionHasZeroMean) {
  const TriMesh m = triangulate(PolygonSection::rectangle(1.0, 1.0), 0.1);
  const TorsionSolution t = solve_torsion(m);
  // P1 mean via lumped vertex weights.
  double mean = 0;
  for (int k = 0; k < static_cast<int>(m.triangles.size()); ++k) {
    for (int v : m.triangles[k]) mean += t.phi(v) * m.triangle_area(k) / 3;
  }
  EXPECT_NEAR(mean, 0.0, 1e-12);
}

TEST(CellProblem, SquareMatchesIsotropicClosedForm) {
  const TriMesh m = triangulate(PolygonSection::rectangle(1, 1), 0.05);
  const IsotropicMaterial mat{1.0, 1.0};
  const double E = 2.5, I = 1.0 / 12;
  const double tau = rectangle_torsion(1, 1);
  for (double a : {0.0, 0.4, 1.1, 2.0, 3.0}) {
    const Eigen::Matrix4d M = condense_stiffness(m, mat, Vec2(std::cos(a), std::sin(a))).M;
    EXPECT_NEAR(M(0, 0) / E, 1.0, 1e-3);
    EXPECT_NEAR(M(1, 1) / (E * I), 1.0, 1e-3);
    EXPECT_NEAR(M(2, 2) / (E * I), 1.0, 1e-3);
    EXPECT_NEAR(M(3, 3) / tau, 1.0, 1e-2);
    EXPECT_NEAR(M(1, 2), 0.0, 1e-4 * E * I);
    EXPECT_NEAR(M(0, 3), 0.0, 1e-6 * E);
    EXPECT_LT((M - M.transpose()).cwiseAbs().maxCoeff(), 1e-14);
  }
}

TEST(CellProblem, RectangleBendingBlockRotates) {
  // For a 2 x 1 rectangle, I2 = 2/3 and I3 = 1/6; the section frame rotated
  // by a sees a rotated inertia tensor.
  const TriMesh m = triangulate(PolygonSection::rectangle(2, 1), 0.07);
  const IsotropicMaterial mat{0.5, 1.0};
  const double E = mat.mu * (3 * mat.lambda + 2 * mat.mu) / (mat.lambda + mat.mu);
  const double a = 0.6, c = std::cos(a), s = std::sin(a);
  const double I2 = 2.0 / 3, I3 = 1.0 / 6;
  const Eigen::Matrix4d M = condense_stiffness(m, mat, Vec2(c, s)).M;
  EXPECT_NEAR(M(1, 1), E * (c * c * I2 + s * s * I3), 2e-3 * E * I2);
  EXPECT_NEAR(M(2, 2), E * (s * s * I2 + c * c * I3), 2e-3 * E * I2);
  EXPECT_NEAR(M(1, 2), E * c * s * (I2 - I3), 2e-3 * E * I2);
}

TEST(CellProblem, SuperpositionAndConstraints) {
  const TriMesh m = triangulate(PolygonSection::ellipse(1, 0.6, 64), 0.12);
  const CellProblem cell(m, [](const Vec2&) { return IsotropicMaterial{1.0, 0.8}; },
                         Vec2(std::cos(0.3), std::sin(0.3)));
  std::mt19937_64 rng(11);
  const AffineField g1 = random_affine(rng), g2 = random_affine(rng);
  AffineField g12;
  g12.c0 = 2 * g1.c0 - 0.5 * g2.c0;
  g12.c2 = 2 * g1.c2 - 0.5 * g2.c2;
  g12.c3 = 2 * g1.c3 - 0.5 * g2.c3;
  const Eigen::VectorXd a1 = cell.minimizer(g1), a2 = cell.minimizer(g2);
  const Eigen::VectorXd a12 = cell.minimizer(g12);
  EXPECT_LT((a12 - (2 * a1 - 0.5 * a2)).norm(), 1e-10 * a12.norm());
  EXPECT_LT(cell.constraint_values(a1).norm(), 1e-12 * (1 + a1.norm()));
}

TEST(CellProblem, MinimizerIsOptimalAndInvariant) {
  const TriMesh m = triangulate(PolygonSection::rectangle(1, 1), 0.1);
  const CellProblem cell(m, [](const Vec2& x) { return IsotropicMaterial{1.0, 1.0 + 0.5 * x.x()}; },
                         Vec2(0.0, 1.0));
  std::mt19937_64 rng(4);
  const AffineField g = random_affine(rng);
  const Eigen::VectorXd a = cell.minimizer(g);
  const double e0 = cell.energy(g, a);
  EXPECT_NEAR(cell.min_energy(g), e0, 1e-10 * e0);
  std::normal_distribution<double> n(0, 1e-3);
  for (int k = 0; k < 5; ++k) {
    Eigen::VectorXd d(a.size());
    for (int i = 0; i < d.size(); ++i) d(i) = n(rng);
    EXPECT_GE(cell.energy(g, a + d), e0);
  }
  const Eigen::VectorXd shift = cell.interpolate(
      [](const Vec2& xp) { return Eigen::Vector3d(0.3, -0.2 - 0.7 * xp.y(), 0.5 + 0.7 * xp.x()); });
  EXPECT_NEAR(cell.energy(g, a + shift), e0, 1e-10 * e0);
}

TEST(CellProblem, HeterogeneousStiffnessPositive) {
  const TriMesh m = triangulate(PolygonSection::rectangle(1, 1), 0.1);
  const CondensedStiffness M = condense_stiffness(
      m, [](const Vec2& x) { return IsotropicMaterial{1.0 + x.y(), 1.0 + 0.8 * x.x()}; },
      Vec2(std::cos(1.0), std::sin(1.0)));
  EXPECT_GT(M.min_eigenvalue(), 0.0);
  // Graded stiffness couples stretching and bending.
  EXPECT_GT(std::abs(M.M(0, 1)) + std::abs(M.M(0, 2)), 1e-3);
}

TEST(CellProblem, NegativeMaterialRejected) {
  const TriMesh m = triangulate(PolygonSection::rectangle(1, 1), 0.2);
  EXPECT_THROW(condense_stiffness(
                   m, [](const Vec2& x) { return IsotropicMaterial{1.0, x.x() > 0 ? 1.0 : -1.0}; },
                   Vec2(1, 0)),
               MaterialPositivityError);
}

TEST(CellProblem, ZeroStrain) {
  const TriMesh m = triangulate(PolygonSection::rectangle(1, 1), 0.2);
  const CellProblem cell(m, [](const Vec2&) { return IsotropicMaterial{1.0, 1.0}; }, Vec2(1, 0));
  const AffineField g = AffineField::from_strain({});
  EXPECT_EQ(cell.minimizer(g).norm(), 0.0);
  EXPECT_EQ(cell.min_energy(g), 0.0);
}

TEST(CellProblem, LambdaZeroSquare) {
  const TriMesh m = triangulate(PolygonSection::rectangle(1, 1), 0.03);
  const Eigen::Matrix4d M = condense_stiffness(m, IsotropicMaterial{0.0, 1.0}, Vec2(1, 0)).M;
  EXPECT_NEAR(M(0, 0), 2.0, 0.02 * 2.0);
  EXPECT_NEAR(M(1, 1), 2.0 / 12, 0.02 * 2.0 / 12);
  EXPECT_NEAR(M(2, 2), 2.0 / 12, 0.02 * 2.0 / 12);
}

TEST(CellProblem, RotationOfSquareSection) {
  // Rotating the frame by 30 degrees equals condensing on the section
  // rotated the other way.
  const TriMesh m = triangulate(PolygonSection::rectangle(1, 1), 0.08);
  const IsotropicMaterial mat{1.0, 1.0};
  const double a = M_PI / 6;
  const Eigen::Matrix4d M0 = condense_stiffness(m, mat, Vec2(1, 0)).M;
  const Eigen::Matrix4d Ma = condense_stiffness(m, mat, Vec2(std::cos(a), std::sin(a))).M;
  EXPECT_NEAR(Ma(0, 0), M0(0, 0), 1e-10 * M0(0, 0));
  EXPECT_NEAR(Ma(3, 3), M0(3, 3), 1e-10 * M0(3, 3));
  TriMesh r = m;
  for (Vec2& x : r.nodes) x = Vec2(std::cos(a) * x.x() - std::sin(a) * x.y(),
                                   std::sin(a) * x.x() + std::cos(a) * x.y());
  const Eigen::Matrix4d Mr = condense_stiffness(r, mat, Vec2(1, 0)).M;
  EXPECT_LT((Mr - Ma).cwiseAbs().maxCoeff(), 1e-10 * Ma.cwiseAbs().maxCoeff());
}

TEST(CellProblem, ClosedFormRotatedProductMoment) {
  const SectionProperties p = compute_moments(PolygonSection::rectangle(2, 1));
  const IsotropicMaterial mat{1.0, 1.0};
  const double s = 1 / std::sqrt(2.0);
  const CondensedStiffness c = closed_form_q(p, mat, 0.5, Vec2(s, s));
  EXPECT_NEAR(c.M(1, 2), mat.young() * (p.I2 - p.I3) / 2, 1e-14);
  const CondensedStiffness sq = closed_form_q(compute_moments(PolygonSection::rectangle(1, 1)), mat, 0.5,
                                              Vec2(std::cos(0.3), std::sin(0.3)));
  EXPECT_NEAR(sq.M(1, 2), 0.0, 1e-15);
}
