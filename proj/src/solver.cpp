#include "gammarod/solver.hpp"

#include <Eigen/SparseCholesky>
#include <cmath>
#include <sstream>

#include "gammarod/errors.hpp"
#include "gammarod/quadrature.hpp"

namespace gammarod {

CompatibilityReport check_compatibility(const LoadCase& loads, const BoundaryCondition& bc,
                                        double length) {
  CompatibilityReport rep;
  const Rule1D rule = gauss_legendre(8);
  const int cells = 256;
  const double h = length / cells;
  for (int k = 0; k < 2; ++k) {
    const ScalarFunction& f = k == 0 ? loads.f2 : loads.f3;
    double i0 = 0, i1 = 0, l2 = 0;
    for (int c = 0; c < cells; ++c) {
      for (std::size_t q = 0; q < rule.points.size(); ++q) {
        const double x = (c + rule.points[q]) * h;
        const double w = rule.weights[q] * h;
        const double v = f(x);
        i0 += w * v;
        i1 += w * x * v;
        l2 += w * v * v;
      }
    }
    const double norm = std::sqrt(l2);
    rep.integral[k] = i0;
    rep.moment[k] = i1;
    // Cauchy-Schwarz bounds scaled down: |int f| <= |f| sqrt(L),
    // |int x f| <= |f| L^(3/2) / sqrt(3).
    rep.integral_bound[k] = 1e-8 * norm * std::sqrt(length);
    rep.moment_bound[k] = 1e-8 * norm * std::pow(length, 1.5) / std::sqrt(3.0);
  }
  if (bc.kind != BoundaryKind::Free) return rep;
  std::ostringstream msg;
  for (int k = 0; k < 2; ++k) {
    if (std::abs(rep.integral[k]) > rep.integral_bound[k]) {
      rep.ok = false;
      msg << "int f" << k + 2 << " = " << rep.integral[k] << " is not zero; ";
    }
    if (std::abs(rep.moment[k]) > rep.moment_bound[k]) {
      rep.ok = false;
      msg << "int x1 f" << k + 2 << " = " << rep.moment[k] << " is not zero; ";
    }
  }
  rep.message = msg.str();
  if (!rep.message.empty()) rep.message.resize(rep.message.size() - 2);
  return rep;
}

std::vector<int> constrained_dofs(const BoundaryCondition& bc, int elements) {
  std::vector<int> d;
  for (int i = 0; i < RodState::kNodeDofs; ++i) d.push_back(i);
  if (bc.kind == BoundaryKind::ClampedBoth) {
    for (int i = 0; i < RodState::kNodeDofs; ++i) d.push_back(RodState::kNodeDofs * elements + i);
  }
  return d;
}

namespace {

using SpMat = Eigen::SparseMatrix<double>;

SpMat selection(const std::vector<int>& free, int n) {
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(free.size());
  for (int i = 0; i < static_cast<int>(free.size()); ++i) t.emplace_back(i, free[i], 1.0);
  SpMat P(static_cast<int>(free.size()), n);
  P.setFromTriplets(t.begin(), t.end());
  return P;
}

bool positive_definite(const Eigen::SimplicialLDLT<SpMat>& f) {
  if (f.info() != Eigen::Success) return false;
  const Eigen::VectorXd& D = f.vectorD();
  return D.size() == 0 || D.minCoeff() > 1e-14 * D.cwiseAbs().maxCoeff();
}

}  // namespace

SolveResult minimize(const DiscreteModel& model, const LoadCase& loads,
                     const BoundaryCondition& bc, const SolveOptions& opts,
                     const RodState* initial, double load_factor) {
  if (!(opts.tol > 0) || opts.max_iter < 1 || !(opts.contraction > 0 && opts.contraction < 1) ||
      !(opts.sufficient_decrease > 0 && opts.sufficient_decrease < 1)) {
    throw ConfigError("invalid solver options");
  }
  const CompatibilityReport comp = check_compatibility(loads, bc, model.length());
  if (!comp.ok) throw IncompatibleLoads(comp.message);

  const int n = model.dofs();
  const int N = model.elements();
  RodState state = initial ? *initial : RodState(N);
  if (state.elements() != N) throw ConfigError("initial state does not match the model mesh");

  const std::vector<int> fixed = constrained_dofs(bc, N);
  std::vector<char> is_fixed(n, 0);
  for (int d : fixed) is_fixed[d] = 1;
  for (int i = 0; i < RodState::kNodeDofs; ++i) {
    state.coeffs()(i) = bc.kind == BoundaryKind::Free ? 0.0 : bc.left[i];
    if (bc.kind == BoundaryKind::ClampedBoth) {
      state.coeffs()(RodState::kNodeDofs * N + i) = bc.right[i];
    }
  }
  std::vector<int> free;
  for (int i = 0; i < n; ++i) {
    if (!is_fixed[i]) free.push_back(i);
  }
  const SpMat P = selection(free, n);
  const Eigen::VectorXd gl = load_factor * model.load_gradient(loads);
  auto J = [&](const RodState& s) { return model.energy(s) + gl.dot(s.coeffs()); };

  SolveResult res;
  SolveReport& rep = res.report;
  rep.tolerance = opts.tol * std::max(1.0, (P * gl).norm());
  double Jx = J(state);
  rep.energies.push_back(Jx);

  Eigen::SimplicialLDLT<SpMat> ldlt;
  for (int it = 1; it <= opts.max_iter; ++it) {
    rep.iterations = it;
    const Eigen::VectorXd g = P * (model.gradient(state) + gl);
    rep.gradient_norm = g.norm();
    const SpMat H = P * model.hessian(state) * P.transpose();
    if (rep.gradient_norm <= rep.tolerance) {
      rep.converged = true;
      ldlt.compute(H);
      rep.hessian_psd = ldlt.info() == Eigen::Success &&
                        (ldlt.vectorD().size() == 0 ||
                         ldlt.vectorD().minCoeff() >= -1e-10 * ldlt.vectorD().cwiseAbs().maxCoeff());
      break;
    }

    double shift = 0.0;
    ldlt.compute(H);
    if (!positive_definite(ldlt)) {
      double dmax = 0.0;
      for (int k = 0; k < H.outerSize(); ++k) {
        for (SpMat::InnerIterator itH(H, k); itH; ++itH) {
          if (itH.row() == itH.col()) dmax = std::max(dmax, std::abs(itH.value()));
        }
      }
      shift = std::max(1e-10 * dmax, 1e-14);
      SpMat I(H.rows(), H.cols());
      I.setIdentity();
      for (;;) {
        ldlt.compute(H + shift * I);
        if (positive_definite(ldlt)) break;
        shift *= 10.0;
        if (!std::isfinite(shift)) throw Error("could not regularize the Hessian");
      }
    }
    const Eigen::VectorXd d = -ldlt.solve(g);
    const double slope = g.dot(d);

    auto trial = [&](double a) {
      RodState s = state;
      s.coeffs() += a * (P.transpose() * d);
      return s;
    };
    double a = 1.0;
    RodState next = trial(a);
    double Jn = J(next);
    bool accepted = false;
    if (-slope <= 1e-13 * (1.0 + std::abs(Jx))) {
      // Energy changes are below roundoff: accept on gradient reduction.
      const double gn = (P * (model.gradient(next) + gl)).norm();
      accepted = gn < rep.gradient_norm;
    } else {
      while (a > 1e-12) {
        if (Jn <= Jx + opts.sufficient_decrease * a * slope) {
          accepted = true;
          break;
        }
        a *= opts.contraction;
        next = trial(a);
        Jn = J(next);
      }
    }
    if (!accepted) {
      rep.message = "line search failed";
      break;
    }
    state = std::move(next);
    Jx = Jn;
    ++rep.newton_steps;
    rep.energies.push_back(Jx);
    rep.shifts.push_back(shift);
  }
  rep.energy = Jx;
  if (!rep.converged && rep.message.empty()) {
    rep.message = "maximum iterations reached";
  } else if (rep.converged) {
    rep.message = "converged";
  }
  res.state = std::move(state);
  return res;
}

std::vector<ContinuationStep> continuation(const DiscreteModel& model, const LoadCase& loads,
                                           const BoundaryCondition& bc, const SolveOptions& opts,
                                           int steps) {
  if (steps < 1) throw ConfigError("continuation needs at least one step");
  std::vector<ContinuationStep> out;
  RodState current(model.elements());
  for (int s = 1; s <= steps; ++s) {
    const double factor = static_cast<double>(s) / steps;
    SolveResult r = minimize(model, loads, bc, opts, &current, factor);
    current = r.state;
    const bool ok = r.report.converged;
    if (!ok) r.report.message += " at load factor " + std::to_string(factor);
    out.push_back({factor, std::move(r.state), std::move(r.report)});
    if (!ok) break;
  }
  return out;
}

}  // namespace gammarod
