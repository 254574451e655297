#include "gammarod/limit_energy.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <iomanip>

#include "gammarod/errors.hpp"
#include "gammarod/quadrature.hpp"

namespace gammarod {

namespace {

struct Hermite {
  std::array<double, 4> v, d1, d2;  // values, x-derivatives, second x-derivatives
};

Hermite hermite(double xi, double le) {
  const double x2 = xi * xi, x3 = x2 * xi;
  Hermite h;
  h.v = {1 - 3 * x2 + 2 * x3, le * (xi - 2 * x2 + x3), 3 * x2 - 2 * x3, le * (-x2 + x3)};
  h.d1 = {(-6 * xi + 6 * x2) / le, 1 - 4 * xi + 3 * x2, (6 * xi - 6 * x2) / le, -2 * xi + 3 * x2};
  h.d2 = {(-6 + 12 * xi) / (le * le), (-4 + 6 * xi) / le, (6 - 12 * xi) / (le * le),
          (-2 + 6 * xi) / le};
  return h;
}

constexpr std::array<int, 4> kV2{1, 2, 7, 8};
constexpr std::array<int, 4> kV3{3, 4, 9, 10};

int locate_element(double x1, double length, int n) {
  int e = static_cast<int>(std::floor(x1 / length * n));
  return std::clamp(e, 0, n - 1);
}

}  // namespace

RodState::RodState(int elements, Eigen::VectorXd q) : q_(std::move(q)) {
  if (q_.size() != kNodeDofs * (elements + 1)) throw ConfigError("state size mismatch");
}

RodState RodState::interpolate(int elements, double length, const std::function<double(double)>& u,
                               const std::function<Jet3(double)>& v2,
                               const std::function<Jet3(double)>& v3,
                               const std::function<double(double)>& w) {
  RodState s(elements);
  for (int i = 0; i <= elements; ++i) {
    const double x = length * i / elements;
    const Jet3 a = v2(x), b = v3(x);
    s.at(i, U) = u(x);
    s.at(i, V2) = a[0];
    s.at(i, DV2) = a[1];
    s.at(i, V3) = b[0];
    s.at(i, DV3) = b[1];
    s.at(i, W) = w(x);
  }
  return s;
}

FieldSample sample(const RodState& state, double length, double x1) {
  const int n = state.elements();
  const double le = length / n;
  const int e = locate_element(x1, length, n);
  const double xi = x1 / le - e;
  const Hermite h = hermite(xi, le);
  const auto& q = state.coeffs();
  const int o = RodState::kNodeDofs * e;
  FieldSample f;
  f.u = (1 - xi) * q(o) + xi * q(o + 6);
  f.du = (q(o + 6) - q(o)) / le;
  f.w = (1 - xi) * q(o + 5) + xi * q(o + 11);
  f.dw = (q(o + 11) - q(o + 5)) / le;
  for (int k = 0; k < 4; ++k) {
    const double c2 = q(o + kV2[k]), c3 = q(o + kV3[k]);
    f.v2 += h.v[k] * c2;
    f.dv2 += h.d1[k] * c2;
    f.ddv2 += h.d2[k] * c2;
    f.v3 += h.v[k] * c3;
    f.dv3 += h.d1[k] * c3;
    f.ddv3 += h.d2[k] * c3;
  }
  return f;
}

GeneralizedStrain strain_measures(const FieldSample& f, double dtheta2, double dtheta3) {
  GeneralizedStrain g;
  g.t = f.du + f.dv2 * dtheta2 + f.dv3 * dtheta3 + 0.5 * (f.dv2 * f.dv2 + f.dv3 * f.dv3);
  g.k2 = f.ddv2;
  g.k3 = f.ddv3;
  g.twist = f.dw;
  return g;
}

GeneralizedStrain strain_measures(const RodState& state, const Curve& curve, double x1) {
  return strain_measures(sample(state, curve.length(), x1), curve.theta2().derivative(x1, 1),
                         curve.theta3().derivative(x1, 1));
}

FieldSample GaugeShift::apply(const FieldSample& f, const Curve& curve, double x1) const {
  const Jet3 t2 = curve.theta2().jet(x1), t3 = curve.theta3().jet(x1);
  const double bb = 0.5 * (b2 * b2 + b3 * b3);
  FieldSample g = f;
  g.u = f.u + cu - b2 * t2[0] - b3 * t3[0] - b2 * f.v2 - b3 * f.v3 - bb * x1;
  g.du = f.du - b2 * t2[1] - b3 * t3[1] - b2 * f.dv2 - b3 * f.dv3 - bb;
  g.v2 = f.v2 + c2 + b2 * x1;
  g.dv2 = f.dv2 + b2;
  g.v3 = f.v3 + c3 + b3 * x1;
  g.dv3 = f.dv3 + b3;
  g.w = f.w + cw;
  return g;
}

StiffnessField closed_form_stiffness(const SectionProperties& props, double tau,
                                     const MaterialField& material, const Curve& curve) {
  if (!material.section_homogeneous()) {
    throw ConfigError("closed-form stiffness needs material constant over the section");
  }
  return [props, tau, material, curve](double x1) {
    const FrameData fd = frame_data(curve, x1);
    return closed_form_q(props, material.at(x1, 0.0, 0.0), tau, Vec2(fd.p2, fd.p3)).M;
  };
}

StiffnessField cell_stiffness(const TriMesh& mesh, const MaterialField& material,
                              const Curve& curve) {
  return [mesh, material, curve](double x1) {
    const FrameData fd = frame_data(curve, x1);
    const SectionMaterial sm = [&material, x1](const Vec2& x) {
      return material.at(x1, x.x(), x.y());
    };
    return condense_stiffness(mesh, sm, Vec2(fd.p2, fd.p3)).M;
  };
}

DiscreteModel::DiscreteModel(Curve curve, int elements, const StiffnessField& stiffness,
                             int quad_points, Exec exec)
    : curve_(std::move(curve)), n_(elements) {
  if (n_ < 1) throw ConfigError("need at least one element");
  le_ = curve_.length() / n_;
  const Rule1D rule = gauss_legendre(quad_points);
  xi_ = rule.points;
  wq_ = rule.weights;
  const int nq = n_ * quad_points;
  M_.resize(nq);
  dth2_.resize(nq);
  dth3_.resize(nq);
  for (int e = 0; e < n_; ++e) {
    for (int q = 0; q < quad_points; ++q) {
      const double x = quad_x(e, q);
      dth2_[e * quad_points + q] = curve_.theta2().derivative(x, 1);
      dth3_[e * quad_points + q] = curve_.theta3().derivative(x, 1);
    }
  }
  // Stiffness sampling may involve one cell solve per point.
  std::exception_ptr err;
#pragma omp parallel for schedule(dynamic) if (exec == Exec::Parallel)
  for (int k = 0; k < nq; ++k) {
    try {
      M_[k] = stiffness(quad_x(k / quad_points, k % quad_points));
    } catch (...) {
#pragma omp critical
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);
}

void DiscreteModel::element(const RodState& s, int e, bool want_grad, bool want_hess,
                            ElementOut& out) const {
  const auto& q = s.coeffs();
  const int o = RodState::kNodeDofs * e;
  out.energy = 0.0;
  if (want_grad) out.grad.setZero();
  if (want_hess) out.hess.setZero();
  const int nq = quad_points();
  for (int k = 0; k < nq; ++k) {
    const Hermite h = hermite(xi_[k], le_);
    const double a2 = dth2_[e * nq + k], a3 = dth3_[e * nq + k];
    const Eigen::Matrix4d& M = M_[e * nq + k];
    const double w = wq_[k] * le_;

    Eigen::Matrix<double, 12, 1> d1v2 = Eigen::Matrix<double, 12, 1>::Zero();
    Eigen::Matrix<double, 12, 1> d1v3 = Eigen::Matrix<double, 12, 1>::Zero();
    Eigen::Matrix<double, 4, 12> B = Eigen::Matrix<double, 4, 12>::Zero();
    double dv2 = 0, dv3 = 0;
    for (int j = 0; j < 4; ++j) {
      d1v2(kV2[j]) = h.d1[j];
      d1v3(kV3[j]) = h.d1[j];
      B(1, kV2[j]) = h.d2[j];
      B(2, kV3[j]) = h.d2[j];
      dv2 += h.d1[j] * q(o + kV2[j]);
      dv3 += h.d1[j] * q(o + kV3[j]);
    }
    const double du = (q(o + 6) - q(o)) / le_;
    const double dw = (q(o + 11) - q(o + 5)) / le_;
    Eigen::Vector4d strain;
    strain(0) = du + dv2 * a2 + dv3 * a3 + 0.5 * (dv2 * dv2 + dv3 * dv3);
    strain(1) = B.row(1).dot(q.segment<12>(o));
    strain(2) = B.row(2).dot(q.segment<12>(o));
    strain(3) = dw;
    const Eigen::Vector4d Me = M * strain;
    out.energy += 0.5 * w * strain.dot(Me);
    if (!want_grad && !want_hess) continue;

    B(0, 0) = -1.0 / le_;
    B(0, 6) = 1.0 / le_;
    B.row(0) += (a2 + dv2) * d1v2.transpose() + (a3 + dv3) * d1v3.transpose();
    B(3, 5) = -1.0 / le_;
    B(3, 11) = 1.0 / le_;
    if (want_grad) out.grad.noalias() += w * B.transpose() * Me;
    if (want_hess) {
      out.hess.noalias() += w * B.transpose() * M * B;
      out.hess.noalias() += (w * Me(0)) * (d1v2 * d1v2.transpose() + d1v3 * d1v3.transpose());
    }
  }
}

double DiscreteModel::energy(const RodState& s, Exec exec) const {
  std::vector<double> part(n_);
#pragma omp parallel for if (exec == Exec::Parallel)
  for (int e = 0; e < n_; ++e) {
    ElementOut out;
    element(s, e, false, false, out);
    part[e] = out.energy;
  }
  double sum = 0.0;
  for (double v : part) sum += v;
  return sum;
}

double DiscreteModel::load_work(const RodState& s, const LoadCase& loads) const {
  const Eigen::VectorXd g = load_gradient(loads);
  return -g.dot(s.coeffs());
}

double DiscreteModel::total_energy(const RodState& s, const LoadCase& loads, Exec exec) const {
  return energy(s, exec) - load_work(s, loads);
}

Eigen::VectorXd DiscreteModel::gradient(const RodState& s, Exec exec) const {
  std::vector<Eigen::Matrix<double, 12, 1>> part(n_);
#pragma omp parallel for if (exec == Exec::Parallel)
  for (int e = 0; e < n_; ++e) {
    ElementOut out;
    element(s, e, true, false, out);
    part[e] = out.grad;
  }
  Eigen::VectorXd g = Eigen::VectorXd::Zero(dofs());
  for (int e = 0; e < n_; ++e) g.segment<12>(RodState::kNodeDofs * e) += part[e];
  return g;
}

Eigen::VectorXd DiscreteModel::load_gradient(const LoadCase& loads) const {
  Eigen::VectorXd g = Eigen::VectorXd::Zero(dofs());
  const int nq = quad_points();
  for (int e = 0; e < n_; ++e) {
    const int o = RodState::kNodeDofs * e;
    for (int k = 0; k < nq; ++k) {
      const Hermite h = hermite(xi_[k], le_);
      const double x = quad_x(e, k);
      const double w = wq_[k] * le_;
      const double f2 = loads.f2(x), f3 = loads.f3(x);
      for (int j = 0; j < 4; ++j) {
        g(o + kV2[j]) -= w * f2 * h.v[j];
        g(o + kV3[j]) -= w * f3 * h.v[j];
      }
    }
  }
  return g;
}

Eigen::SparseMatrix<double> DiscreteModel::hessian(const RodState& s, Exec exec) const {
  std::vector<Eigen::Matrix<double, 12, 12>> part(n_);
#pragma omp parallel for if (exec == Exec::Parallel)
  for (int e = 0; e < n_; ++e) {
    ElementOut out;
    element(s, e, false, true, out);
    part[e] = out.hess;
  }
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(n_) * 144);
  for (int e = 0; e < n_; ++e) {
    const int o = RodState::kNodeDofs * e;
    for (int i = 0; i < 12; ++i) {
      for (int j = 0; j < 12; ++j) {
        if (part[e](i, j) != 0.0) trip.emplace_back(o + i, o + j, part[e](i, j));
      }
    }
  }
  Eigen::SparseMatrix<double> H(dofs(), dofs());
  H.setFromTriplets(trip.begin(), trip.end());
  return H;
}

double DiscreteModel::field_energy(const std::function<FieldSample(double)>& fields) const {
  double sum = 0.0;
  const int nq = quad_points();
  for (int e = 0; e < n_; ++e) {
    for (int k = 0; k < nq; ++k) {
      const double x = quad_x(e, k);
      const Eigen::Vector4d strain =
          strain_measures(fields(x), dth2_[e * nq + k], dth3_[e * nq + k]).vector();
      sum += 0.5 * wq_[k] * le_ * strain.dot(M_[e * nq + k] * strain);
    }
  }
  return sum;
}

double DiscreteModel::min_stiffness_eigenvalue() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& M : M_) m = std::min(m, CondensedStiffness{M}.min_eigenvalue());
  return m;
}

void DiscreteModel::write_csv(std::ostream& os, const RodState& s, int samples) const {
  os << "x1,u,v2,v3,w,t,k2,k3,twist\n";
  os << std::setprecision(12);
  for (int i = 0; i <= samples; ++i) {
    const double x = length() * i / samples;
    const FieldSample f = sample(s, length(), x);
    const GeneralizedStrain g = strain_measures(s, curve_, x);
    os << x << ',' << f.u << ',' << f.v2 << ',' << f.v3 << ',' << f.w << ',' << g.t << ','
       << g.k2 << ',' << g.k3 << ',' << g.twist << '\n';
  }
}

}  // namespace gammarod
