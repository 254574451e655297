#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <Eigen/SparseCholesky>
#include <functional>
#include <memory>
#include <vector>

#include "gammarod/cross_section.hpp"
#include "gammarod/material.hpp"
#include "gammarod/mesh.hpp"

namespace gammarod {

/// (t, kappa2, kappa3, twist) = (t, v2'', v3'', w').
struct GeneralizedStrain {
  double t = 0.0;
  double k2 = 0.0;
  double k3 = 0.0;
  double twist = 0.0;

  Eigen::Vector4d vector() const { return {t, k2, k3, twist}; }
  static GeneralizedStrain from_vector(const Eigen::Vector4d& e) { return {e(0), e(1), e(2), e(3)}; }
  /// Skew matrix with rows (0,-k2,-k3), (k2,0,-twist), (k3,twist,0).
  Mat3 skew() const;
};

struct CondensedStiffness {
  Eigen::Matrix4d M = Eigen::Matrix4d::Zero();

  double energy_density(const Eigen::Vector4d& e) const { return e.dot(M * e); }
  double min_eigenvalue() const;
};

struct TorsionSolution {
  Eigen::VectorXd phi;  // nodal values, mean zero
  double tau = 0.0;
};

TorsionSolution solve_torsion(const TriMesh& mesh);

/// Matrix field c0 + x2' c2 + x3' c3 on the rotated section.
struct AffineField {
  Mat3 c0 = Mat3::Zero();
  Mat3 c2 = Mat3::Zero();
  Mat3 c3 = Mat3::Zero();

  Mat3 at(const Vec2& xp) const { return c0 + xp.x() * c2 + xp.y() * c3; }
  /// First column t e1 + F (0, x2', x3')^T, other columns zero.
  static AffineField from_strain(const GeneralizedStrain& e);
};

/// Material as a function of the section point before rotation.
using SectionMaterial = std::function<IsotropicMaterial(const Vec2&)>;

/// Piecewise-linear cell problem on the section rotated by (p2, p3):
/// minimize int Q3(g + (0 | d2' alpha | d3' alpha)) over alpha with zero
/// mean and zero rotation moment.
///
/// The energy is blind to constants and in-plane rotations, which are
/// exactly the directions the four constraints cut out. The system is
/// factored with those four directions pinned and the constraints are then
/// restored by subtracting the matching null field.
class CellProblem {
 public:
  CellProblem(const TriMesh& mesh, const SectionMaterial& material, const Vec2& p);

  int dofs() const { return 3 * static_cast<int>(mesh_.nodes.size()); }
  Vec2 rotated(const Vec2& x) const;

  Eigen::VectorXd minimizer(const AffineField& g) const;
  /// int Q3(g + G(alpha)), evaluated directly by quadrature.
  double energy(const AffineField& g, const Eigen::VectorXd& alpha) const;
  /// Minimum value of energy(g, .) over the constrained space.
  double min_energy(const AffineField& g) const;
  /// (int alpha_1, int alpha_2, int alpha_3, int x3' alpha_2 - x2' alpha_3)
  Eigen::Vector4d constraint_values(const Eigen::VectorXd& alpha) const;
  /// Nodal interpolant of a field given in rotated coordinates.
  Eigen::VectorXd interpolate(const std::function<Eigen::Vector3d(const Vec2&)>& f) const;

  CondensedStiffness condense() const;

 private:
  struct Element {
    std::array<int, 3> n;
    double area;
    std::array<Vec2, 3> xp;     // rotated vertex coordinates
    std::array<Vec2, 3> grad;   // gradients of the hat functions in x'
    ElasticityTensor b;
  };

  Eigen::VectorXd load(const AffineField& g) const;
  Eigen::VectorXd solve(const Eigen::VectorXd& f) const;
  double field_energy(const AffineField& g1, const AffineField& g2) const;

  const TriMesh& mesh_;
  Vec2 p_;
  std::vector<Element> elems_;
  Eigen::SparseMatrix<double> K_;
  Eigen::SparseMatrix<double> C_;
  std::unique_ptr<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>> ldlt_;
  std::array<int, 4> pinned_{};
  Eigen::Matrix<double, Eigen::Dynamic, 4> null_;  // constants and in-plane rotation
  Eigen::Matrix4d null_gram_inv_;
};

CondensedStiffness condense_stiffness(const TriMesh& mesh, const SectionMaterial& material,
                                      const Vec2& p);
CondensedStiffness condense_stiffness(const TriMesh& mesh, const IsotropicMaterial& material,
                                      const Vec2& p);

/// Homogeneous isotropic closed form: E A, rotated bending block, mu tau.
CondensedStiffness closed_form_q(const SectionProperties& props, const IsotropicMaterial& mat,
                                 double tau, const Vec2& p);

}  // namespace gammarod
