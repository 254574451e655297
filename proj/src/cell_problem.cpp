#include "gammarod/cell_problem.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseLU>
#include <cmath>

#include "gammarod/errors.hpp"
#include "gammarod/quadrature.hpp"

namespace gammarod {

using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

Mat3 GeneralizedStrain::skew() const {
  Mat3 F;
  F << 0, -k2, -k3, k2, 0, -twist, k3, twist, 0;
  return F;
}

double CondensedStiffness::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(0.5 * (M + M.transpose()),
                                                    Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

AffineField AffineField::from_strain(const GeneralizedStrain& e) {
  AffineField g;
  g.c0(0, 0) = e.t;
  const Mat3 F = e.skew();
  g.c2.col(0) = F.col(1);
  g.c3.col(0) = F.col(2);
  return g;
}

namespace {

struct LinearTriangle {
  double area;
  std::array<Vec2, 3> grad;
};

LinearTriangle linear_triangle(const Vec2& a, const Vec2& b, const Vec2& c) {
  const double det = (b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y());
  LinearTriangle t;
  t.area = 0.5 * det;
  t.grad[0] = Vec2(b.y() - c.y(), c.x() - b.x()) / det;
  t.grad[1] = Vec2(c.y() - a.y(), a.x() - c.x()) / det;
  t.grad[2] = Vec2(a.y() - b.y(), b.x() - a.x()) / det;
  return t;
}

}  // namespace

TorsionSolution solve_torsion(const TriMesh& mesh) {
  const int n = static_cast<int>(mesh.nodes.size());
  std::vector<Triplet> trip;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 1);
  for (const auto& tri : mesh.triangles) {
    const auto lt = linear_triangle(mesh.nodes[tri[0]], mesh.nodes[tri[1]], mesh.nodes[tri[2]]);
    if (!(lt.area > 0)) throw MeshError("torsion: degenerate triangle");
    const Vec2 xc = (mesh.nodes[tri[0]] + mesh.nodes[tri[1]] + mesh.nodes[tri[2]]) / 3.0;
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) trip.emplace_back(tri[a], tri[b], lt.area * lt.grad[a].dot(lt.grad[b]));
      // -int (x3 d2 N_a - x2 d3 N_a); the integrand is linear.
      rhs(tri[a]) -= lt.area * (xc.y() * lt.grad[a].x() - xc.x() * lt.grad[a].y());
      trip.emplace_back(n, tri[a], lt.area / 3.0);
      trip.emplace_back(tri[a], n, lt.area / 3.0);
    }
  }
  SpMat A(n + 1, n + 1);
  A.setFromTriplets(trip.begin(), trip.end());
  Eigen::SparseLU<SpMat> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success) throw MeshError("torsion system is singular");
  const Eigen::VectorXd sol = lu.solve(rhs);

  TorsionSolution out;
  out.phi = sol.head(n);
  const auto& rule = triangle_rule3();
  double tau = 0.0;
  for (const auto& tri : mesh.triangles) {
    const Vec2 p[3] = {mesh.nodes[tri[0]], mesh.nodes[tri[1]], mesh.nodes[tri[2]]};
    const auto lt = linear_triangle(p[0], p[1], p[2]);
    Vec2 gphi = Vec2::Zero();
    for (int a = 0; a < 3; ++a) gphi += out.phi(tri[a]) * lt.grad[a];
    for (int q = 0; q < 3; ++q) {
      const Vec2 x = rule.bary[q][0] * p[0] + rule.bary[q][1] * p[1] + rule.bary[q][2] * p[2];
      tau += lt.area * rule.weights[q] *
             (x.squaredNorm() - x.x() * gphi.y() + x.y() * gphi.x());
    }
  }
  out.tau = tau;
  return out;
}

CellProblem::CellProblem(const TriMesh& mesh, const SectionMaterial& material, const Vec2& p)
    : mesh_(mesh), p_(p) {
  if (std::abs(p.squaredNorm() - 1.0) > 1e-10) {
    throw InvalidGeometry("cell problem rotation must be a unit vector");
  }
  const int nn = static_cast<int>(mesh.nodes.size());
  const int nd = 3 * nn;
  const auto& rule = triangle_rule3();
  std::vector<Triplet> kt, ct;
  elems_.reserve(mesh.triangles.size());
  for (const auto& tri : mesh.triangles) {
    Element el;
    el.n = tri;
    for (int a = 0; a < 3; ++a) el.xp[a] = rotated(mesh.nodes[tri[a]]);
    const auto lt = linear_triangle(el.xp[0], el.xp[1], el.xp[2]);
    if (!(lt.area > 0)) throw MeshError("cell problem: degenerate triangle");
    el.area = lt.area;
    el.grad = lt.grad;
    const Vec2 xc = (mesh.nodes[tri[0]] + mesh.nodes[tri[1]] + mesh.nodes[tri[2]]) / 3.0;
    const IsotropicMaterial m = material(xc);
    if (!m.admissible()) {
      throw MaterialPositivityError("material not positive definite inside the section");
    }
    el.b = b_tensor(m);

    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        for (int i = 0; i < 3; ++i) {
          for (int j = 0; j < 3; ++j) {
            double s = 0.0;
            for (int h = 1; h < 3; ++h) {
              for (int k = 1; k < 3; ++k) {
                s += el.b.b[h][k](i, j) * el.grad[a](h - 1) * el.grad[b](k - 1);
              }
            }
            if (s != 0.0) kt.emplace_back(3 * tri[a] + i, 3 * tri[b] + j, el.area * s);
          }
        }
      }
    }
    for (int a = 0; a < 3; ++a) {
      for (int i = 0; i < 3; ++i) ct.emplace_back(i, 3 * tri[a] + i, el.area / 3.0);
      double m2 = 0.0, m3 = 0.0;  // int x3' N_a, int x2' N_a
      for (int q = 0; q < 3; ++q) {
        const Vec2 x = rule.bary[q][0] * el.xp[0] + rule.bary[q][1] * el.xp[1] +
                       rule.bary[q][2] * el.xp[2];
        m2 += rule.weights[q] * el.area * x.y() * rule.bary[q][a];
        m3 += rule.weights[q] * el.area * x.x() * rule.bary[q][a];
      }
      ct.emplace_back(3, 3 * tri[a] + 1, m2);
      ct.emplace_back(3, 3 * tri[a] + 2, -m3);
    }
    elems_.push_back(el);
  }
  K_.resize(nd, nd);
  K_.setFromTriplets(kt.begin(), kt.end());
  C_.resize(4, nd);
  C_.setFromTriplets(ct.begin(), ct.end());

  // Pin translation at node 0 and the rotation at the node farthest away.
  int far = 0;
  const Vec2 x0 = rotated(mesh.nodes[0]);
  for (int a = 1; a < nn; ++a) {
    if ((rotated(mesh.nodes[a]) - x0).norm() > (rotated(mesh.nodes[far]) - x0).norm()) far = a;
  }
  const Vec2 dx = rotated(mesh.nodes[far]) - x0;
  pinned_ = {0, 1, 2, 3 * far + (std::abs(dx.y()) >= std::abs(dx.x()) ? 1 : 2)};
  std::vector<char> is_pinned(nd, 0);
  for (int d : pinned_) is_pinned[d] = 1;
  std::vector<Triplet> st;
  st.reserve(kt.size());
  for (const auto& t : kt) {
    if (!is_pinned[t.row()] && !is_pinned[t.col()]) st.push_back(t);
  }
  for (int d : pinned_) st.emplace_back(d, d, 1.0);
  SpMat S(nd, nd);
  S.setFromTriplets(st.begin(), st.end());
  ldlt_ = std::make_unique<Eigen::SimplicialLDLT<SpMat>>();
  ldlt_->compute(S);
  if (ldlt_->info() != Eigen::Success) throw MeshError("cell problem system is singular");
  if (ldlt_->vectorD().minCoeff() <= 0.0) {
    throw MaterialPositivityError("cell problem stiffness is not positive definite");
  }

  null_.setZero(nd, 4);
  for (int a = 0; a < nn; ++a) {
    const Vec2 x = rotated(mesh.nodes[a]);
    for (int i = 0; i < 3; ++i) null_(3 * a + i, i) = 1.0;
    null_(3 * a + 1, 3) = -x.y();
    null_(3 * a + 2, 3) = x.x();
  }
  const Eigen::Matrix4d cn = C_ * null_;
  Eigen::FullPivLU<Eigen::Matrix4d> cn_lu(cn);
  if (!cn_lu.isInvertible()) throw MeshError("cell problem constraints are rank deficient");
  null_gram_inv_ = cn_lu.inverse();
}

Eigen::VectorXd CellProblem::solve(const Eigen::VectorXd& f) const {
  Eigen::VectorXd rhs = -f;
  for (int d : pinned_) rhs(d) = 0.0;
  Eigen::VectorXd alpha = ldlt_->solve(rhs);
  alpha -= null_ * (null_gram_inv_ * (C_ * alpha));
  return alpha;
}

Vec2 CellProblem::rotated(const Vec2& x) const {
  return {p_.x() * x.x() - p_.y() * x.y(), p_.y() * x.x() + p_.x() * x.y()};
}

Eigen::VectorXd CellProblem::load(const AffineField& g) const {
  Eigen::VectorXd f = Eigen::VectorXd::Zero(dofs());
  for (const auto& el : elems_) {
    // g is affine and the gradients are constant: the centroid rule is exact.
    const Mat3 gc = g.at((el.xp[0] + el.xp[1] + el.xp[2]) / 3.0);
    for (int j = 0; j < 3; ++j) {
      for (int k = 1; k < 3; ++k) {
        double s = 0.0;
        for (int h = 0; h < 3; ++h) {
          for (int i = 0; i < 3; ++i) s += el.b.b[h][k](i, j) * gc(i, h);
        }
        for (int a = 0; a < 3; ++a) f(3 * el.n[a] + j) += el.area * s * el.grad[a](k - 1);
      }
    }
  }
  return f;
}

double CellProblem::field_energy(const AffineField& g1, const AffineField& g2) const {
  const auto& rule = triangle_rule3();
  double s = 0.0;
  for (const auto& el : elems_) {
    for (int q = 0; q < 3; ++q) {
      const Vec2 x = rule.bary[q][0] * el.xp[0] + rule.bary[q][1] * el.xp[1] +
                     rule.bary[q][2] * el.xp[2];
      s += el.area * rule.weights[q] * el.b.bilinear(g1.at(x), g2.at(x));
    }
  }
  return s;
}

Eigen::VectorXd CellProblem::minimizer(const AffineField& g) const {
  return solve(load(g));
}

double CellProblem::energy(const AffineField& g, const Eigen::VectorXd& alpha) const {
  const auto& rule = triangle_rule3();
  double s = 0.0;
  for (const auto& el : elems_) {
    Mat3 ga = Mat3::Zero();
    for (int a = 0; a < 3; ++a) {
      const Eigen::Vector3d v = alpha.segment<3>(3 * el.n[a]);
      ga.col(1) += v * el.grad[a](0);
      ga.col(2) += v * el.grad[a](1);
    }
    for (int q = 0; q < 3; ++q) {
      const Vec2 x = rule.bary[q][0] * el.xp[0] + rule.bary[q][1] * el.xp[1] +
                     rule.bary[q][2] * el.xp[2];
      s += el.area * rule.weights[q] * q3_apply(el.b, g.at(x) + ga);
    }
  }
  return s;
}

double CellProblem::min_energy(const AffineField& g) const {
  const Eigen::VectorXd alpha = minimizer(g);
  return field_energy(g, g) + load(g).dot(alpha);
}

Eigen::Vector4d CellProblem::constraint_values(const Eigen::VectorXd& alpha) const {
  return C_ * alpha;
}

Eigen::VectorXd CellProblem::interpolate(
    const std::function<Eigen::Vector3d(const Vec2&)>& f) const {
  Eigen::VectorXd out(dofs());
  for (int a = 0; a < static_cast<int>(mesh_.nodes.size()); ++a) {
    out.segment<3>(3 * a) = f(rotated(mesh_.nodes[a]));
  }
  return out;
}

CondensedStiffness CellProblem::condense() const {
  std::array<AffineField, 4> g;
  std::array<Eigen::VectorXd, 4> f, alpha;
  for (int i = 0; i < 4; ++i) {
    g[i] = AffineField::from_strain(GeneralizedStrain::from_vector(Eigen::Vector4d::Unit(i)));
    f[i] = load(g[i]);
    alpha[i] = solve(f[i]);
  }
  CondensedStiffness cs;
  for (int i = 0; i < 4; ++i) {
    const Eigen::VectorXd Ka = K_ * alpha[i];
    for (int j = 0; j < 4; ++j) {
      cs.M(i, j) = field_energy(g[i], g[j]) + f[i].dot(alpha[j]) + f[j].dot(alpha[i]) +
                   alpha[j].dot(Ka);
    }
  }
  cs.M = 0.5 * (cs.M + cs.M.transpose()).eval();
  return cs;
}

CondensedStiffness condense_stiffness(const TriMesh& mesh, const SectionMaterial& material,
                                      const Vec2& p) {
  return CellProblem(mesh, material, p).condense();
}

CondensedStiffness condense_stiffness(const TriMesh& mesh, const IsotropicMaterial& material,
                                      const Vec2& p) {
  return condense_stiffness(mesh, [material](const Vec2&) { return material; }, p);
}

CondensedStiffness closed_form_q(const SectionProperties& props, const IsotropicMaterial& mat,
                                 double tau, const Vec2& p) {
  const double E = mat.young();
  const double p2 = p.x(), p3 = p.y();
  CondensedStiffness cs;
  cs.M(0, 0) = E * props.area;
  cs.M(1, 1) = E * (p2 * p2 * props.I2 + p3 * p3 * props.I3);
  cs.M(2, 2) = E * (p3 * p3 * props.I2 + p2 * p2 * props.I3);
  cs.M(1, 2) = cs.M(2, 1) = E * p2 * p3 * (props.I2 - props.I3);
  cs.M(3, 3) = mat.mu * tau;
  return cs;
}

}  // namespace gammarod
