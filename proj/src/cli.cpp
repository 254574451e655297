#include "gammarod/cli.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>

#include "gammarod/cell_problem.hpp"
#include "gammarod/errors.hpp"
#include "gammarod/mesh.hpp"
#include "gammarod/parallel.hpp"

namespace gammarod {

namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "1.0.0";

struct SectionSetup {
  NormalizedSection normalized;
  SectionProperties props;
  TriMesh mesh;
  double tau = 0.0;
};

SectionSetup setup_section(const RunConfig& cfg, double edge) {
  SectionSetup s{normalize_section(*cfg.section), {}, {}, 0.0};
  s.props = compute_moments(s.normalized.section);
  s.mesh = triangulate(s.normalized.section, edge);
  s.tau = solve_torsion(s.mesh).tau;
  return s;
}

json matrix_json(const Eigen::Matrix4d& M) {
  json rows = json::array();
  for (int i = 0; i < 4; ++i) {
    rows.push_back({M(i, 0), M(i, 1), M(i, 2), M(i, 3)});
  }
  return rows;
}

json mesh_json(const TriMesh& m) {
  return {{"nodes", m.nodes.size()},
          {"triangles", m.triangles.size()},
          {"max_edge", m.max_edge()},
          {"min_angle_deg", m.min_angle() * 180.0 / M_PI}};
}

void write_xy(const fs::path& path, const std::vector<double>& x, const std::vector<double>& y) {
  std::ofstream out(path);
  out << std::setprecision(12);
  for (std::size_t i = 0; i < x.size(); ++i) out << x[i] << ' ' << y[i] << '\n';
}

StiffnessField make_stiffness(const RunConfig& cfg, const SectionSetup& sec,
                              std::string& mode) {
  mode = cfg.stiffness;
  if (mode == "auto") mode = cfg.material.section_homogeneous() ? "closed-form" : "cell";
  if (mode == "closed-form") return closed_form_stiffness(sec.props, sec.tau, cfg.material, *cfg.curve);
  return cell_stiffness(sec.mesh, cfg.material, *cfg.curve);
}

json section_command(const RunConfig& cfg, const fs::path&, const RunOptions&, std::ostream&,
                     int& code) {
  const SectionSetup sec = setup_section(cfg, cfg.section_edge);
  const SectionProperties raw = compute_moments(*cfg.section);
  auto props_json = [](const SectionProperties& p) {
    return json{{"area", p.area},
                {"centroid", {p.centroid.x(), p.centroid.y()}},
                {"I2", p.I2},
                {"I3", p.I3},
                {"I23", p.I23},
                {"polar", p.polar}};
  };
  const SectionMaterial sm = [&cfg](const Vec2& x) { return cfg.material.at(0.0, x.x(), x.y()); };
  json rots = json::array();
  for (double r : cfg.rotations) {
    const Vec2 p(std::cos(r), std::sin(r));
    const CondensedStiffness M = condense_stiffness(sec.mesh, sm, p);
    json row = {{"angle", r},
                {"p", {p.x(), p.y()}},
                {"M", matrix_json(M.M)},
                {"min_eigenvalue", M.min_eigenvalue()}};
    if (cfg.material.section_homogeneous()) {
      const CondensedStiffness C =
          closed_form_q(sec.props, cfg.material.at(0.0, 0.0, 0.0), sec.tau, p);
      row["M_closed_form"] = matrix_json(C.M);
      row["max_rel_diff"] = (M.M - C.M).cwiseAbs().maxCoeff() / C.M.cwiseAbs().maxCoeff();
    }
    rots.push_back(row);
  }
  code = kExitOk;
  return {{"section",
           {{"input", props_json(raw)},
            {"normalized", props_json(sec.props)},
            {"transform",
             {{"translation", {sec.normalized.transform.translation.x(),
                               sec.normalized.transform.translation.y()}},
              {"angle", sec.normalized.transform.angle}}},
            {"mesh", mesh_json(sec.mesh)},
            {"tau", sec.tau},
            {"stiffness", rots}}}};
}

json report_json(const SolveReport& r) {
  return {{"converged", r.converged},
          {"iterations", r.iterations},
          {"newton_steps", r.newton_steps},
          {"gradient_norm", r.gradient_norm},
          {"tolerance", r.tolerance},
          {"energy", r.energy},
          {"energies", r.energies},
          {"shifts", r.shifts},
          {"hessian_psd", r.hessian_psd},
          {"message", r.message}};
}

json solve_command(const RunConfig& cfg, const fs::path& out, const RunOptions& opts,
                   std::ostream& log, int& code) {
  const double L = cfg.curve->length();
  const CompatibilityReport comp = check_compatibility(cfg.loads, cfg.bc, L);
  json jcomp = {{"ok", comp.ok},
                {"integral", comp.integral},
                {"moment", comp.moment},
                {"integral_bound", comp.integral_bound},
                {"moment_bound", comp.moment_bound},
                {"message", comp.message}};
  if (!comp.ok) {
    log << "incompatible loads for a free rod: " << comp.message << '\n';
    code = kExitIncompatibleLoads;
    return {{"compatibility", jcomp}};
  }

  const SectionSetup sec = setup_section(cfg, cfg.section_edge);
  std::string mode;
  const StiffnessField stiff = make_stiffness(cfg, sec, mode);
  const DiscreteModel model(*cfg.curve, cfg.elements, stiff);

  json steps = json::array();
  RodState state(cfg.elements);
  SolveReport last;
  const auto cont =
      continuation(model, cfg.loads, cfg.bc, cfg.solver, cfg.solver.continuation_steps);
  for (const auto& s : cont) {
    json js = report_json(s.report);
    js["factor"] = s.factor;
    steps.push_back(js);
  }
  state = cont.back().state;
  last = cont.back().report;
  const bool done = last.converged && cont.back().factor == 1.0;

  {
    std::ofstream csv(out / "state.csv");
    model.write_csv(csv, state, 4 * cfg.elements);
  }
  if (opts.plot_data) {
    fs::create_directories(out / "plot");
    const int n = 4 * cfg.elements;
    std::vector<double> x(n + 1), u(n + 1), v2(n + 1), v3(n + 1), w(n + 1);
    for (int i = 0; i <= n; ++i) {
      x[i] = L * i / n;
      const FieldSample f = sample(state, L, x[i]);
      u[i] = f.u;
      v2[i] = f.v2;
      v3[i] = f.v3;
      w[i] = f.w;
    }
    write_xy(out / "plot" / "u.dat", x, u);
    write_xy(out / "plot" / "v2.dat", x, v2);
    write_xy(out / "plot" / "v3.dat", x, v3);
    write_xy(out / "plot" / "w.dat", x, w);
    std::vector<double> it(last.energies.size());
    for (std::size_t i = 0; i < it.size(); ++i) it[i] = static_cast<double>(i);
    write_xy(out / "plot" / "energy.dat", it, last.energies);
  }
  if (!done) {
    log << "solver did not converge: " << last.message << '\n';
    code = kExitNonconvergence;
  } else {
    code = kExitOk;
  }
  return {{"compatibility", jcomp},
          {"stiffness_mode", mode},
          {"min_stiffness_eigenvalue", model.min_stiffness_eigenvalue()},
          {"dofs", model.dofs()},
          {"solve", report_json(last)},
          {"continuation", steps},
          {"state_csv", "state.csv"}};
}

json frenet_command(const RunConfig& cfg, const fs::path& out, const RunOptions& opts,
                    std::ostream&, int& code) {
  const ExpansionReport r = expansion_report(*cfg.curve, cfg.frenet_h, cfg.frenet_x1_samples);
  if (opts.plot_data) {
    fs::create_directories(out / "plot");
    write_xy(out / "plot" / "err_t.dat", r.h, r.err_t);
    write_xy(out / "plot" / "err_n.dat", r.h, r.err_n);
    write_xy(out / "plot" / "err_b.dat", r.h, r.err_b);
    write_xy(out / "plot" / "err_jacobian.dat", r.h, r.err_jacobian);
    write_xy(out / "plot" / "err_inverse.dat", r.h, r.err_inverse);
  }
  code = kExitOk;
  return {{"expansion",
           {{"h", r.h},
            {"err_t", r.err_t},
            {"err_n", r.err_n},
            {"err_b", r.err_b},
            {"err_jacobian", r.err_jacobian},
            {"err_inverse", r.err_inverse},
            {"det_deviation", r.det_deviation},
            {"slope_t", r.slope_t},
            {"slope_n", r.slope_n},
            {"slope_b", r.slope_b},
            {"slope_jacobian", r.slope_jacobian},
            {"slope_inverse", r.slope_inverse},
            {"det_constant", r.det_constant}}}};
}

json gradcheck_command(const RunConfig& cfg, const fs::path&, const RunOptions&, std::ostream&,
                       int& code) {
  const SectionSetup sec = setup_section(cfg, cfg.section_edge);
  std::string mode;
  const StiffnessField stiff = make_stiffness(cfg, sec, mode);
  const DiscreteModel model(*cfg.curve, cfg.gradcheck_elements, stiff);
  std::mt19937_64 rng(cfg.gradcheck_seed);
  std::uniform_real_distribution<double> dist(-cfg.gradcheck_amplitude, cfg.gradcheck_amplitude);
  json samples = json::array();
  DerivativeCheck worst;
  for (int s = 0; s < cfg.gradcheck_samples; ++s) {
    RodState st(cfg.gradcheck_elements);
    for (int i = 0; i < st.coeffs().size(); ++i) st.coeffs()(i) = dist(rng);
    const DerivativeCheck c = check_derivatives(model, st);
    worst.gradient_rel_error = std::max(worst.gradient_rel_error, c.gradient_rel_error);
    worst.hessian_rel_error = std::max(worst.hessian_rel_error, c.hessian_rel_error);
    worst.hessian_asymmetry = std::max(worst.hessian_asymmetry, c.hessian_asymmetry);
    samples.push_back({{"gradient_rel_error", c.gradient_rel_error},
                       {"hessian_rel_error", c.hessian_rel_error},
                       {"hessian_asymmetry", c.hessian_asymmetry}});
  }
  code = kExitOk;
  return {{"gradcheck",
           {{"stiffness_mode", mode},
            {"dofs", model.dofs()},
            {"samples", samples},
            {"max_gradient_rel_error", worst.gradient_rel_error},
            {"max_hessian_rel_error", worst.hessian_rel_error},
            {"max_hessian_asymmetry", worst.hessian_asymmetry}}}};
}

json gamma_command(const RunConfig& cfg, const fs::path& out, const RunOptions& opts,
                   std::ostream&, int& code) {
  const SectionSetup sec = setup_section(cfg, cfg.gamma.section_edge);
  const Curve& curve = *cfg.curve;
  struct Variant {
    std::string name;
    WarpField warp;
  };
  std::vector<Variant> variants;
  if (cfg.gamma.warp_terms.empty()) {
    variants.push_back({"none", WarpField()});
  } else {
    // Both warp families are reported; the configured one comes first.
    const bool p = cfg.gamma.project;
    variants.push_back({p ? "projected" : "unprojected",
                        WarpField(cfg.gamma.warp_terms, p, sec.normalized.section, curve)});
    variants.push_back({p ? "unprojected" : "projected",
                        WarpField(cfg.gamma.warp_terms, !p, sec.normalized.section, curve)});
  }
  json tables = json::array();
  std::ofstream csv(out / "gamma-check.csv");
  csv << "warp,h,e3d,elimit,diff\n" << std::setprecision(15);
  for (const auto& v : variants) {
    const GammaTable t = gamma_table(curve, cfg.material, cfg.gamma.state, v.warp, cfg.gamma.h,
                                     sec.mesh, cfg.gamma.quad);
    json rows = json::array();
    std::vector<double> hs, ds;
    for (const auto& r : t.rows) {
      rows.push_back({{"h", r.h}, {"e3d", r.e3d}, {"elimit", r.elimit}, {"diff", r.diff}});
      csv << v.name << ',' << r.h << ',' << r.e3d << ',' << r.elimit << ',' << r.diff << '\n';
      hs.push_back(r.h);
      ds.push_back(r.diff);
    }
    if (opts.plot_data) {
      fs::create_directories(out / "plot");
      write_xy(out / "plot" / ("gamma_" + v.name + ".dat"), hs, ds);
    }
    tables.push_back({{"warp", v.name}, {"rows", rows}, {"slope", t.slope}});
  }
  const double i0 = smooth_limit_energy(cfg.gamma.state, curve, cfg.material, sec.mesh,
                                        cfg.gamma.quad);
  code = kExitOk;
  return {{"gamma",
           {{"mesh", mesh_json(sec.mesh)},
            {"tables", tables},
            {"limit_energy_cell_optimal", i0},
            {"csv", "gamma-check.csv"}}}};
}

}  // namespace

DerivativeCheck check_derivatives(const DiscreteModel& model, const RodState& state,
                                  double step) {
  const int n = model.dofs();
  const Eigen::VectorXd g = model.gradient(state);
  const Eigen::MatrixXd H = Eigen::MatrixXd(model.hessian(state));
  Eigen::VectorXd gfd(n);
  Eigen::MatrixXd Hfd(n, n);
  RodState work = state;
  for (int i = 0; i < n; ++i) {
    const double q = state.coeffs()(i);
    const double d = step * std::max(1.0, std::abs(q));
    work.coeffs()(i) = q + d;
    const double ep = model.energy(work);
    const Eigen::VectorXd gp = model.gradient(work);
    work.coeffs()(i) = q - d;
    const double em = model.energy(work);
    const Eigen::VectorXd gm = model.gradient(work);
    work.coeffs()(i) = q;
    gfd(i) = (ep - em) / (2 * d);
    Hfd.col(i) = (gp - gm) / (2 * d);
  }
  DerivativeCheck c;
  c.gradient_rel_error = (gfd - g).norm() / std::max(g.norm(), 1e-300);
  c.hessian_rel_error = (Hfd - H).norm() / std::max(H.norm(), 1e-300);
  c.hessian_asymmetry =
      (H - H.transpose()).cwiseAbs().maxCoeff() / std::max(H.cwiseAbs().maxCoeff(), 1e-300);
  return c;
}

int run(const std::string& command, const std::string& config_path, const std::string& out_dir,
        const RunOptions& opts, std::ostream& log) {
  using Handler = json (*)(const RunConfig&, const fs::path&, const RunOptions&, std::ostream&,
                           int&);
  Handler handler = nullptr;
  if (command == "section") handler = section_command;
  if (command == "solve") handler = solve_command;
  if (command == "frenet-check") handler = frenet_command;
  if (command == "gradcheck") handler = gradcheck_command;
  if (command == "gamma-check") handler = gamma_command;

  const fs::path out(out_dir);
  json report = {{"command", command}, {"version", kVersion}, {"config", nullptr}};
  int code = kExitOk;
  std::string status = "ok";
  try {
    fs::create_directories(out);
  } catch (const fs::filesystem_error& e) {
    log << "cannot create output directory: " << e.what() << '\n';
    return kExitConfig;
  }
  if (opts.threads > 0) set_num_threads(opts.threads);
  try {
    if (!handler) throw ConfigError("unknown command '" + command + "'");
    const RunConfig cfg = load_config(config_path);
    report["config"] = cfg.resolved;
    report["result"] = handler(cfg, out, opts, log, code);
    if (code == kExitIncompatibleLoads) status = "incompatible_loads";
    if (code == kExitNonconvergence) status = "not_converged";
  } catch (const IncompatibleLoads& e) {
    code = kExitIncompatibleLoads;
    status = "incompatible_loads";
    report["message"] = e.what();
  } catch (const GeometryRegimeError& e) {
    code = kExitGeometryRegime;
    status = "geometry_regime";
    report["message"] = e.what();
  } catch (const Error& e) {
    // Invalid geometry, meshing, material and missing-frame failures are
    // all problems with the input.
    code = kExitConfig;
    status = "config_error";
    report["message"] = e.what();
  }
  if (report.contains("message")) log << "error: " << report["message"].get<std::string>() << '\n';
  report["status"] = status;
  report["exit_code"] = code;
  std::ofstream(out / (command + ".json")) << report.dump(2) << '\n';
  return code;
}

int cli_main(int argc, char** argv) {
  CLI::App app{"Limit-model solver and validation tools for thin weakly curved rods"};
  app.require_subcommand(1);
  std::string config, out = ".";
  RunOptions opts;
  app.set_version_flag("--version", kVersion);
  const char* commands[][2] = {
      {"section", "cross-section properties, torsional rigidity and condensed stiffness"},
      {"solve", "minimize the one-dimensional limit energy"},
      {"frenet-check", "residuals of the first-order frame and Jacobian expansions"},
      {"gradcheck", "finite-difference check of gradient and Hessian"},
      {"gamma-check", "recovery-sequence energies against the limit density"},
  };
  for (auto& c : commands) {
    CLI::App* sub = app.add_subcommand(c[0], c[1]);
    sub->add_option("--config", config, "JSON configuration file")->required();
    sub->add_option("--out", out, "output directory")->capture_default_str();
    sub->add_option("--threads", opts.threads, "worker threads (default: all cores)")
        ->check(CLI::NonNegativeNumber);
    sub->add_flag("--plot-data", opts.plot_data, "write x/y column files under <out>/plot");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }
  const std::string cmd = app.get_subcommands().front()->get_name();
  return run(cmd, config, out, opts, std::cerr);
}

}  // namespace gammarod
