#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <functional>
#include <ostream>
#include <vector>

#include "gammarod/cell_problem.hpp"
#include "gammarod/parallel.hpp"
#include "gammarod/rod_geometry.hpp"

namespace gammarod {

/// Nodal unknowns [u, v2, v2', v3, v3', w]; u and w piecewise linear,
/// v2 and v3 Hermite cubic.
class RodState {
 public:
  static constexpr int kNodeDofs = 6;
  enum Dof { U = 0, V2 = 1, DV2 = 2, V3 = 3, DV3 = 4, W = 5 };

  RodState() = default;
  explicit RodState(int elements) : q_(Eigen::VectorXd::Zero(kNodeDofs * (elements + 1))) {}
  RodState(int elements, Eigen::VectorXd q);

  int elements() const { return static_cast<int>(q_.size()) / kNodeDofs - 1; }
  int nodes() const { return elements() + 1; }
  double& at(int node, Dof d) { return q_(kNodeDofs * node + d); }
  double at(int node, Dof d) const { return q_(kNodeDofs * node + d); }
  Eigen::VectorXd& coeffs() { return q_; }
  const Eigen::VectorXd& coeffs() const { return q_; }

  /// Nodal interpolation of smooth fields (v-slopes from the derivative).
  static RodState interpolate(int elements, double length,
                              const std::function<double(double)>& u,
                              const std::function<Jet3(double)>& v2,
                              const std::function<Jet3(double)>& v3,
                              const std::function<double(double)>& w);

 private:
  Eigen::VectorXd q_;
};

/// Field values and derivatives at one point.
struct FieldSample {
  double u = 0, du = 0;
  double v2 = 0, dv2 = 0, ddv2 = 0;
  double v3 = 0, dv3 = 0, ddv3 = 0;
  double w = 0, dw = 0;
};

FieldSample sample(const RodState& state, double length, double x1);

GeneralizedStrain strain_measures(const FieldSample& f, double dtheta2, double dtheta3);
GeneralizedStrain strain_measures(const RodState& state, const Curve& curve, double x1);

/// The six-parameter family leaving every strain measure unchanged.
struct GaugeShift {
  double cu = 0, c2 = 0, c3 = 0, cw = 0, b2 = 0, b3 = 0;
  FieldSample apply(const FieldSample& f, const Curve& curve, double x1) const;
};

struct LoadCase {
  ScalarFunction f2;
  ScalarFunction f3;
};

using StiffnessField = std::function<Eigen::Matrix4d(double x1)>;

/// Closed-form stiffness for sections with homogeneous isotropic material
/// (grading along x1 allowed).
StiffnessField closed_form_stiffness(const SectionProperties& props, double tau,
                                     const MaterialField& material, const Curve& curve);

/// Cell-problem stiffness; material may vary over the section.
StiffnessField cell_stiffness(const TriMesh& mesh, const MaterialField& material,
                              const Curve& curve);

class DiscreteModel {
 public:
  static constexpr int kQuadPoints = 5;

  DiscreteModel(Curve curve, int elements, const StiffnessField& stiffness,
                int quad_points = kQuadPoints, Exec exec = Exec::Parallel);

  const Curve& curve() const { return curve_; }
  int elements() const { return n_; }
  int dofs() const { return RodState::kNodeDofs * (n_ + 1); }
  double length() const { return curve_.length(); }
  double element_length() const { return le_; }
  int quad_points() const { return static_cast<int>(xi_.size()); }
  /// Stiffness at quadrature point q of element e.
  const Eigen::Matrix4d& stiffness(int e, int q) const { return M_[e * quad_points() + q]; }
  double quad_x(int e, int q) const { return (e + xi_[q]) * le_; }

  /// Limit energy I0.
  double energy(const RodState& s, Exec exec = Exec::Parallel) const;
  /// int (f2 v2 + f3 v3)
  double load_work(const RodState& s, const LoadCase& loads) const;
  /// J0 = I0 - load work.
  double total_energy(const RodState& s, const LoadCase& loads,
                      Exec exec = Exec::Parallel) const;

  Eigen::VectorXd gradient(const RodState& s, Exec exec = Exec::Parallel) const;
  /// Gradient of -load work (state independent).
  Eigen::VectorXd load_gradient(const LoadCase& loads) const;
  Eigen::SparseMatrix<double> hessian(const RodState& s, Exec exec = Exec::Parallel) const;

  /// I0 of arbitrary smooth fields by the model quadrature.
  double field_energy(const std::function<FieldSample(double)>& fields) const;

  /// Minimum eigenvalue of M over all quadrature points.
  double min_stiffness_eigenvalue() const;

  /// Rows (x1, u, v2, v3, w, t, k2, k3, twist) at samples+1 uniform points.
  void write_csv(std::ostream& os, const RodState& s, int samples) const;

 private:
  struct ElementOut {
    double energy = 0;
    Eigen::Matrix<double, 12, 1> grad;
    Eigen::Matrix<double, 12, 12> hess;
  };
  void element(const RodState& s, int e, bool want_grad, bool want_hess, ElementOut& out) const;

  Curve curve_;
  int n_;
  double le_;
  std::vector<double> xi_, wq_;
  std::vector<Eigen::Matrix4d> M_;
  std::vector<double> dth2_, dth3_;
};

}  // namespace gammarod
