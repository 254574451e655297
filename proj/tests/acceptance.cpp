// Acceptance suite: one PASS/FAIL line per criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "gammarod/cell_problem.hpp"
#include "gammarod/cli.hpp"
#include "gammarod/gamma_check.hpp"
#include "gammarod/mesh.hpp"
#include "gammarod/solver.hpp"

using namespace gammarod;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double square_torsion_series() {
  double s = 0;
  for (int n = 1; n < 400; n += 2) s += std::tanh(n * M_PI / 2) / std::pow(n, 5);
  return (1 - 192.0 / std::pow(M_PI, 5) * s) / 3.0;
}

double young(const IsotropicMaterial& m) {
  return m.mu * (3 * m.lambda + 2 * m.mu) / (m.lambda + m.mu);
}

Outcome torsion() {
  const auto t0 = std::chrono::steady_clock::now();
  const double disk = solve_torsion(triangulate(PolygonSection::disk(1.0, 512), 0.03)).tau;
  const double ell = solve_torsion(triangulate(PolygonSection::ellipse(1.0, 0.5, 512), 0.03)).tau;
  const double sq = solve_torsion(triangulate(PolygonSection::rectangle(1, 1), 0.03)).tau;
  const double e1 = std::abs(disk / (M_PI / 2) - 1);
  const double e2 = std::abs(ell / (M_PI / 10) - 1);
  const double e3 = std::abs(sq / square_torsion_series() - 1);
  const double t = seconds_since(t0);
  const bool ok = e1 < 0.01 && e2 < 0.01 && e3 < 0.01 && t < 10;
  return {ok, "rel err disk " + fmt("%.2e", e1) + ", ellipse " + fmt("%.2e", e2) + ", square " +
                  fmt("%.2e", e3) + ", " + fmt("%.2f s", t)};
}

Outcome condensed_vs_closed_form() {
  const IsotropicMaterial mat{1.0, 1.0};
  const double E = young(mat);
  struct Case {
    PolygonSection sec;
    double area, inertia, tau;
  };
  const Case cases[] = {{PolygonSection::disk(1.0, 512), M_PI, M_PI / 4, M_PI / 2},
                        {PolygonSection::rectangle(1, 1), 1.0, 1.0 / 12, square_torsion_series()}};
  double worst = 0, worst_t = 0;
  for (const auto& c : cases) {
    const TriMesh m = triangulate(c.sec, 0.03);
    for (double a : {0.0, 0.5, 1.0, 2.2, 4.0}) {
      const Eigen::Matrix4d M = condense_stiffness(m, mat, Vec2(std::cos(a), std::sin(a))).M;
      const Eigen::Vector4d d(E * c.area, E * c.inertia, E * c.inertia, mat.mu * c.tau);
      for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
          const double scale = std::sqrt(d(i) * d(j));
          const double ref = i == j ? d(i) : 0.0;
          worst = std::max(worst, std::abs(M(i, j) - ref) / scale);
          if (i == 0 && j > 0) worst_t = std::max(worst_t, std::abs(M(i, j)) / scale);
        }
      }
    }
  }
  return {worst <= 0.02 && worst_t < 1e-3,
          "max entry rel dev " + fmt("%.2e", worst) + ", t-coupling " + fmt("%.2e", worst_t)};
}

Curve helix_arch() {
  return Curve(1.0, ScalarFunction::trig({1}, {1}), ScalarFunction::trig({1}, {1}, {M_PI / 2}));
}

Outcome positivity() {
  const Curve c(2.0, ScalarFunction::polynomial({0, 0.3, 0.5}), ScalarFunction::trig({0.2}, {2.0}));
  const MaterialField mat({0.8, 1.2}, 2.0, {0.5, 0.4, -0.3});
  const TriMesh m = triangulate(PolygonSection::ellipse(1.0, 0.6, 96), 0.08);
  double lo = 1e300;
  for (int k = 0; k < 20; ++k) {
    const double x1 = 2.0 * k / 19;
    const FrameData f = frame_data(c, x1);
    const CondensedStiffness M = condense_stiffness(
        m, [&](const Vec2& x) { return mat.at(x1, x.x(), x.y()); }, Vec2(f.p2, f.p3));
    lo = std::min(lo, M.min_eigenvalue());
  }
  return {lo > 0, "min eigenvalue over 20 sections " + fmt("%.4e", lo)};
}

Outcome derivatives() {
  const Curve c = helix_arch();
  const TriMesh m = triangulate(PolygonSection::rectangle(1, 1), 0.2);
  const MaterialField mat({1.0, 1.0}, 1.0, {0.3, 0.2, 0.0});
  const DiscreteModel model(c, 6, cell_stiffness(m, mat, c));
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> dist(-0.2, 0.2);
  double eg = 0, eh = 0, asym = 0;
  const double step = 1e-6;
  for (int s = 0; s < 20; ++s) {
    RodState st(model.elements());
    for (int i = 0; i < st.coeffs().size(); ++i) st.coeffs()(i) = dist(rng);
    const Eigen::VectorXd g = model.gradient(st);
    const Eigen::MatrixXd H(model.hessian(st));
    Eigen::VectorXd gfd(g.size());
    Eigen::MatrixXd Hfd(H.rows(), H.cols());
    RodState w = st;
    for (int i = 0; i < g.size(); ++i) {
      const double q = st.coeffs()(i);
      w.coeffs()(i) = q + step;
      const double ep = model.energy(w);
      const Eigen::VectorXd gp = model.gradient(w);
      w.coeffs()(i) = q - step;
      const double em = model.energy(w);
      const Eigen::VectorXd gm = model.gradient(w);
      w.coeffs()(i) = q;
      gfd(i) = (ep - em) / (2 * step);
      Hfd.col(i) = (gp - gm) / (2 * step);
    }
    eg = std::max(eg, (gfd - g).norm() / g.norm());
    eh = std::max(eh, (Hfd - H).norm() / H.norm());
    asym = std::max(asym, (H - H.transpose()).cwiseAbs().maxCoeff() / H.cwiseAbs().maxCoeff());
  }
  return {eg <= 1e-6 && eh <= 1e-5 && asym <= 1e-12,
          "grad " + fmt("%.2e", eg) + ", hess " + fmt("%.2e", eh) + ", asym " + fmt("%.2e", asym)};
}

Outcome gauge() {
  const Curve c(1.5, ScalarFunction::trig({0.4}, {2.0}, {0.1}), ScalarFunction::polynomial({0, 0.2, -0.3}));
  const StiffnessField stiff = [](double x) {
    Eigen::Matrix4d M;
    M << 4.0, 0.2, 0.1, 0.0,
         0.2, 1.0 + 0.2 * x, 0.05, 0.1,
         0.1, 0.05, 0.7, 0.0,
         0.0, 0.1, 0.0, 0.4;
    return M;
  };
  const DiscreteModel model(c, 24, stiff);
  const auto base = [](double x) {
    FieldSample f;
    f.u = 0.1 * std::cos(2 * x);
    f.du = -0.2 * std::sin(2 * x);
    f.v2 = 0.3 * std::sin(x);
    f.dv2 = 0.3 * std::cos(x);
    f.ddv2 = -0.3 * std::sin(x);
    f.v3 = 0.05 * x * x;
    f.dv3 = 0.1 * x;
    f.ddv3 = 0.1;
    f.w = 0.2 * x * x;
    f.dw = 0.4 * x;
    return f;
  };
  const double i0 = model.field_energy(base);
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> d(-2, 2);
  double worst = 0;
  for (int k = 0; k < 100; ++k) {
    const GaugeShift g{d(rng), d(rng), d(rng), d(rng), d(rng), d(rng)};
    const double i1 = model.field_energy([&](double x) { return g.apply(base(x), c, x); });
    worst = std::max(worst, std::abs(i1 - i0) / (1 + i0));
  }
  return {worst <= 1e-10, "max |dI0|/(1+I0) " + fmt("%.2e", worst)};
}

Outcome linearization() {
  const auto t0 = std::chrono::steady_clock::now();
  const IsotropicMaterial base{1.0, 1.0};
  const MaterialField mat(base);
  const Curve c(1.0, ScalarFunction(), ScalarFunction(), ScalarFunction::constant(0.0));
  const NormalizedSection ns = normalize_section(PolygonSection::rectangle(1, 1));
  const TriMesh m = triangulate(ns.section, 0.05);
  const double tau = solve_torsion(m).tau;
  const DiscreteModel model(c, 64, closed_form_stiffness(compute_moments(ns.section), tau, mat, c));
  const double q = 1e-4, L = 1.0, EI = young(base) / 12;
  const SolveResult r = minimize(model, {ScalarFunction::constant(q), ScalarFunction()}, {}, {});
  double dmax = 0, vmax = 0;
  for (int i = 0; i <= 256; ++i) {
    const double x = L * i / 256;
    const double v = q * x * x * (L - x) * (L - x) / (24 * EI);
    dmax = std::max(dmax, std::abs(sample(r.state, L, x).v2 - v));
    vmax = std::max(vmax, v);
  }
  const double t = seconds_since(t0);
  return {r.report.converged && dmax <= 0.01 * vmax && t < 5,
          "max-norm rel dev " + fmt("%.2e", dmax / vmax) + ", " + fmt("%.2f s", t)};
}

Outcome free_compatibility() {
  const fs::path dir = fs::temp_directory_path() / "gammarod_acceptance_free";
  fs::remove_all(dir);
  fs::create_directories(dir);
  auto run_with = [&](const json& loads, const std::string& sub) {
    const json cfg = {{"curve", {{"length", 1.0}, {"frame_angle", 0.0}}},
                      {"boundary", "free"},
                      {"loads", loads},
                      {"discretization", {{"elements", 32}, {"section_edge", 0.1}}}};
    std::ofstream(dir / (sub + ".json")) << cfg.dump();
    std::ostringstream log;
    return run("solve", (dir / (sub + ".json")).string(), (dir / sub).string(), {}, log);
  };
  const int bad = run_with(
      {{"f2", {{"type", "trig"}, {"amplitudes", {1.0}}, {"frequencies", {2 * M_PI}}}}}, "sine");
  const int good = run_with({{"f2", {{"type", "trig"}, {"amplitudes", {0.01}},
                                     {"frequencies", {2 * M_PI}}, {"phases", {M_PI / 2}}}}},
                            "cosine");
  double gnorm = -1;
  if (good == 0) {
    std::ifstream in(dir / "cosine" / "solve.json");
    gnorm = json::parse(in)["result"]["solve"]["gradient_norm"].get<double>();
  }
  fs::remove_all(dir);
  return {bad == 2 && good == 0 && gnorm >= 0 && gnorm <= 1e-9,
          "sine exit " + std::to_string(bad) + ", cosine exit " + std::to_string(good) +
              ", gradient norm " + fmt("%.2e", gnorm)};
}

Outcome expansions() {
  const Curve c(1.0, ScalarFunction::polynomial({0, 0.3, 0.5}), ScalarFunction::trig({0.3}, {2.0}));
  const ExpansionReport r = expansion_report(c, {0.2, 0.1, 0.05, 0.025});
  const double lo = std::min({r.slope_t, r.slope_n, r.slope_b, r.slope_jacobian});
  return {lo >= 1.9 && r.slope_inverse >= 0.9,
          "slopes t " + fmt("%.3f", r.slope_t) + ", n " + fmt("%.3f", r.slope_n) + ", b " +
              fmt("%.3f", r.slope_b) + ", grad " + fmt("%.3f", r.slope_jacobian) + ", inverse " +
              fmt("%.3f", r.slope_inverse)};
}

Outcome gamma_limsup() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<double> hs{0.2, 0.1, 0.05, 0.025};
  const PolygonSection sec = PolygonSection::rectangle(1, 1);
  const TriMesh m = triangulate(sec, 0.1);
  const MaterialField mat({1.0, 1.0});
  auto decreasing = [](const GammaTable& t) {
    for (std::size_t i = 1; i < t.rows.size(); ++i) {
      if (!(t.rows[i].diff < t.rows[i - 1].diff)) return false;
    }
    return true;
  };
  const Curve straight(1.0, ScalarFunction(), ScalarFunction(), ScalarFunction::constant(0.0));
  const SmoothState stretch{ScalarFunction::polynomial({0, 0.1}), {}, {}, {}};
  const GammaTable a = gamma_table(straight, mat, stretch, WarpField(), hs, m);
  const Curve arch = helix_arch();
  const SmoothState bend{ScalarFunction::trig({0.05}, {2}, {0.3}), ScalarFunction::trig({0.2}, {3}, {0.1}),
                         ScalarFunction::polynomial({0, 0.1, -0.2, 0.1}),
                         ScalarFunction::trig({0.3}, {2}, {0.5})};
  const WarpField warp({{0, 1, 1, ScalarFunction::trig({0.2}, {1})},
                        {1, 2, 0, ScalarFunction::constant(0.1)},
                        {2, 0, 2, ScalarFunction::polynomial({0.1, 0.2})}},
                       true, sec, arch);
  const GammaTable b = gamma_table(arch, mat, bend, warp, hs, m);
  const double t = seconds_since(t0);
  return {decreasing(a) && decreasing(b) && a.slope >= 0.9 && b.slope >= 0.9 && t < 60,
          "slopes stretch " + fmt("%.3f", a.slope) + ", arch " + fmt("%.3f", b.slope) + ", " +
              fmt("%.2f s", t)};
}

Outcome absorption() {
  const TriMesh m = triangulate(PolygonSection::rectangle(1, 1), 0.1);
  const CellProblem cell(m, [](const Vec2&) { return IsotropicMaterial{1.0, 1.0}; },
                         Vec2(std::cos(0.4), std::sin(0.4)));
  const CondensedStiffness M = cell.condense();
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> d(-1, 1);
  double worst = 0;
  for (int k = 0; k < 50; ++k) {
    Mat3 S;
    S << 0, d(rng), d(rng), 0, d(rng), d(rng), 0, 0, d(rng);
    S = (S + S.transpose()).eval();
    const GeneralizedStrain e{d(rng), d(rng), d(rng), d(rng)};
    worst = std::max(worst, std::abs(absorption_check(cell, M, S, e)) / M.energy_density(e.vector()));
  }
  return {worst <= 1e-8, "max relative residual " + fmt("%.2e", worst)};
}

Outcome cell_linearity() {
  const TriMesh m = triangulate(PolygonSection::rectangle(1, 1), 0.1);
  const CellProblem cell(m, [](const Vec2& x) { return IsotropicMaterial{1.0 + 0.3 * x.y(), 1.0 + 0.5 * x.x()}; },
                         Vec2(std::cos(1.1), std::sin(1.1)));
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> d(-1, 1);
  auto random_field = [&]() {
    AffineField g;
    for (int i = 0; i < 9; ++i) {
      g.c0(i / 3, i % 3) = d(rng);
      g.c2(i / 3, i % 3) = d(rng);
      g.c3(i / 3, i % 3) = d(rng);
    }
    return g;
  };
  double sup = 0, drift = 0;
  for (int k = 0; k < 5; ++k) {
    const AffineField g1 = random_field(), g2 = random_field();
    const double a = d(rng), b = d(rng);
    AffineField g;
    g.c0 = a * g1.c0 + b * g2.c0;
    g.c2 = a * g1.c2 + b * g2.c2;
    g.c3 = a * g1.c3 + b * g2.c3;
    const Eigen::VectorXd x = cell.minimizer(g);
    const Eigen::VectorXd y = a * cell.minimizer(g1) + b * cell.minimizer(g2);
    sup = std::max(sup, (x - y).norm() / x.norm());
    const double c0 = d(rng), c1 = d(rng), c2 = d(rng), r = d(rng);
    const Eigen::VectorXd shift = cell.interpolate(
        [&](const Vec2& xp) { return Eigen::Vector3d(c0, c1 - r * xp.y(), c2 + r * xp.x()); });
    const double e0 = cell.energy(g, x);
    drift = std::max(drift, std::abs(cell.energy(g, x + shift) - e0) / e0);
  }
  return {sup <= 1e-10 && drift <= 1e-10,
          "superposition " + fmt("%.2e", sup) + ", invariance drift " + fmt("%.2e", drift)};
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"AC1 torsional rigidity", torsion},
      {"AC2 condensed stiffness vs closed form", condensed_vs_closed_form},
      {"AC3 uniform positivity", positivity},
      {"AC4 gradient/Hessian vs finite differences", derivatives},
      {"AC5 gauge invariance", gauge},
      {"AC6 linear beam limit", linearization},
      {"AC7 free-boundary compatibility", free_compatibility},
      {"AC8 frame and Jacobian expansions", expansions},
      {"AC9 recovery energy convergence", gamma_limsup},
      {"AC10 absorption identity", absorption},
      {"AC11 cell minimizer linearity and invariance", cell_linearity},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("[%s] %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(std::size(criteria)) - failed,
              std::size(criteria));
  return failed == 0 ? 0 : 1;
}
