#pragma once

#include <Eigen/Core>
#include <memory>
#include <vector>

#include "gammarod/cell_problem.hpp"
#include "gammarod/limit_energy.hpp"
#include "gammarod/parallel.hpp"
#include "gammarod/rod_geometry.hpp"

namespace gammarod {

/// Displacement fields with analytic derivatives.
struct SmoothState {
  ScalarFunction u, v2, v3, w;
};

/// coeff(x1) * x2'^a * x3'^b in component `component` (0-based), with x'
/// the rotated section coordinates.
struct WarpTerm {
  int component = 0;
  int a = 0, b = 0;
  ScalarFunction coeff;
};

/// Polynomial warp field. With projection, each section's mean is removed
/// and the rotation moment int (x3' eta2 - x2' eta3) is cancelled by an
/// in-plane rotation.
class WarpField {
 public:
  WarpField() = default;
  WarpField(std::vector<WarpTerm> terms, bool project, const PolygonSection& section,
            const Curve& curve);

  struct Eval {
    Vec3 eta = Vec3::Zero();
    Vec3 d1 = Vec3::Zero();   // x1-derivative at a fixed section point
    Vec3 d2p = Vec3::Zero();  // derivative in x2'
    Vec3 d3p = Vec3::Zero();  // derivative in x3'
  };
  /// x: section point before rotation.
  Eval eval(double x1, const Vec2& x) const;

  bool empty() const { return terms_.empty(); }
  bool projected() const { return project_; }
  const std::vector<WarpTerm>& terms() const { return terms_; }

 private:
  std::vector<WarpTerm> terms_;
  bool project_ = false;
  std::shared_ptr<const Curve> curve_;
  Eigen::MatrixXd moments_;  // int x2^i x3^j over the unrotated section
  double area_ = 0.0;
  double polar_ = 0.0;
};

/// sym(J - A^2/2 + K) at x1 and section point x (before rotation).
Mat3 limit_strain(const SmoothState& s, const Curve& curve, const WarpField& warp, double x1,
                  const Vec2& x);

struct GammaQuadrature {
  int x1_elements = 32;
  int x1_order = 6;
};

/// (1/h^4) int_Omega W(x, grad y^h o Theta^h o P^h) for the recovery
/// deformation built from s and warp. Throws GeometryRegimeError when
/// det grad y^h <= 0.5 somewhere.
double recovery_energy(const Curve& curve, const MaterialField& mat, const SmoothState& s,
                       const WarpField& warp, double h, const TriMesh& mesh,
                       const GammaQuadrature& quad = {}, Exec exec = Exec::Parallel);

/// 1/2 int_Omega Q3(x, G~(x)).
double limit_density(const SmoothState& s, const Curve& curve, const MaterialField& mat,
                     const WarpField& warp, const TriMesh& mesh, const GammaQuadrature& quad = {},
                     Exec exec = Exec::Parallel);

/// limit_density with the warp replaced, section by section, by the
/// piecewise-linear cell minimizer.
double limit_density_cell_optimal(const SmoothState& s, const Curve& curve,
                                  const MaterialField& mat, const TriMesh& mesh,
                                  const GammaQuadrature& quad = {}, Exec exec = Exec::Parallel);

/// I0 of the smooth state with the cell-problem stiffness, same x1 rule.
double smooth_limit_energy(const SmoothState& s, const Curve& curve, const MaterialField& mat,
                           const TriMesh& mesh, const GammaQuadrature& quad = {},
                           Exec exec = Exec::Parallel);

/// min over warps of int Q3(sym(S + (t e1 + F x' | d2' a | d3' a))) minus e.Me.
double absorption_check(const CellProblem& cell, const CondensedStiffness& M, const Mat3& S,
                        const GeneralizedStrain& e);

struct GammaRow {
  double h, e3d, elimit, diff;
};

struct GammaTable {
  std::vector<GammaRow> rows;
  double slope = 0.0;
};

GammaTable gamma_table(const Curve& curve, const MaterialField& mat, const SmoothState& s,
                       const WarpField& warp, const std::vector<double>& hs, const TriMesh& mesh,
                       const GammaQuadrature& quad = {}, Exec exec = Exec::Parallel);

}  // namespace gammarod
