#include "gammarod/config.hpp"

#include <fstream>
#include <set>

#include "gammarod/errors.hpp"

namespace gammarod {

namespace {

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key())) throw ConfigError("unknown key '" + it.key() + "' in " + where);
  }
}

std::vector<double> number_list(const json& j, const char* key, std::vector<double> fallback) {
  auto v = get_or<std::vector<double>>(j, key, std::move(fallback));
  return v;
}

}  // namespace

ScalarFunction parse_function(const json& spec, json& resolved) {
  if (spec.is_number()) {
    resolved = {{"type", "constant"}, {"value", spec.get<double>()}};
    return ScalarFunction::constant(spec.get<double>());
  }
  if (!spec.is_object() || !spec.contains("type")) {
    throw ConfigError("function spec must be a number or an object with a 'type'");
  }
  const std::string type = spec.at("type").get<std::string>();
  if (type == "constant") {
    check_keys(spec, {"type", "value"}, "constant function");
    const double v = get_or<double>(spec, "value", 0.0);
    resolved = {{"type", "constant"}, {"value", v}};
    return ScalarFunction::constant(v);
  }
  if (type == "poly") {
    check_keys(spec, {"type", "coeffs"}, "poly function");
    auto c = get_or<std::vector<double>>(spec, "coeffs", {0.0});
    if (c.empty()) c = {0.0};
    resolved = {{"type", "poly"}, {"coeffs", c}};
    return ScalarFunction::polynomial(c);
  }
  if (type == "trig") {
    check_keys(spec, {"type", "amplitudes", "frequencies", "phases"}, "trig function");
    auto a = get_or<std::vector<double>>(spec, "amplitudes", {});
    auto f = get_or<std::vector<double>>(spec, "frequencies", {});
    auto p = get_or<std::vector<double>>(spec, "phases", std::vector<double>(a.size(), 0.0));
    resolved = {{"type", "trig"}, {"amplitudes", a}, {"frequencies", f}, {"phases", p}};
    return ScalarFunction::trig(a, f, p);
  }
  if (type == "spline") {
    check_keys(spec, {"type", "knots", "values", "slopes"}, "spline function");
    auto k = get_or<std::vector<double>>(spec, "knots", {});
    auto v = get_or<std::vector<double>>(spec, "values", {});
    auto s = get_or<std::vector<double>>(spec, "slopes", {0.0, 0.0});
    if (s.size() != 2) throw ConfigError("spline 'slopes' needs two end slopes");
    resolved = {{"type", "spline"}, {"knots", k}, {"values", v}, {"slopes", s}};
    return ScalarFunction::spline(k, v, s[0], s[1]);
  }
  throw ConfigError("unknown function type '" + type + "'");
}

RunConfig parse_config(const json& j) {
  check_keys(j,
             {"units", "curve", "section", "material", "loads", "boundary", "discretization",
              "solver", "section_report", "frenet_check", "gradcheck", "gamma_check"},
             "config");
  RunConfig cfg;
  json& r = cfg.resolved;
  try {
    const json units = j.value("units", json::object());
    check_keys(units, {"length", "pressure"}, "units");
    r["units"] = {{"length", units.value("length", "1")}, {"pressure", units.value("pressure", "1")}};

    // Curve.
    const json curve = j.value("curve", json::object());
    check_keys(curve, {"length", "theta2", "theta3", "frame_angle"}, "curve");
    const double L = get_or<double>(curve, "length", 1.0);
    json rc = {{"length", L}};
    ScalarFunction th2 = parse_function(curve.value("theta2", json(0.0)), rc["theta2"]);
    ScalarFunction th3 = parse_function(curve.value("theta3", json(0.0)), rc["theta3"]);
    std::optional<ScalarFunction> angle;
    if (curve.contains("frame_angle")) angle = parse_function(curve["frame_angle"], rc["frame_angle"]);
    cfg.curve.emplace(L, th2, th3, angle);
    r["curve"] = rc;

    // Section.
    const json sec = j.value("section", json{{"shape", "rect"}});
    const std::string shape = sec.value("shape", "rect");
    if (shape == "rect") {
      check_keys(sec, {"shape", "a", "b"}, "section");
      const double a = get_or<double>(sec, "a", 1.0), b = get_or<double>(sec, "b", a);
      cfg.section = PolygonSection::rectangle(a, b);
      r["section"] = {{"shape", "rect"}, {"a", a}, {"b", b}};
    } else if (shape == "disk") {
      check_keys(sec, {"shape", "r", "n_vertices"}, "section");
      const double rad = get_or<double>(sec, "r", 1.0);
      const int n = get_or<int>(sec, "n_vertices", 512);
      cfg.section = PolygonSection::disk(rad, n);
      r["section"] = {{"shape", "disk"}, {"r", rad}, {"n_vertices", n}};
    } else if (shape == "ellipse") {
      check_keys(sec, {"shape", "a", "b", "n_vertices"}, "section");
      const double a = get_or<double>(sec, "a", 1.0), b = get_or<double>(sec, "b", 0.5);
      const int n = get_or<int>(sec, "n_vertices", 512);
      cfg.section = PolygonSection::ellipse(a, b, n);
      r["section"] = {{"shape", "ellipse"}, {"a", a}, {"b", b}, {"n_vertices", n}};
    } else if (shape == "polygon") {
      check_keys(sec, {"shape", "vertices"}, "section");
      std::vector<Vec2> v;
      for (const auto& p : sec.at("vertices")) {
        if (!p.is_array() || p.size() != 2) throw ConfigError("polygon vertices must be [x, y] pairs");
        v.emplace_back(p[0].get<double>(), p[1].get<double>());
      }
      cfg.section = PolygonSection(v);
      json verts = json::array();
      for (const auto& p : cfg.section->vertices()) verts.push_back({p.x(), p.y()});
      r["section"] = {{"shape", "polygon"}, {"vertices", verts}};
    } else {
      throw ConfigError("unknown section shape '" + shape + "'");
    }

    // Material.
    const json mat = j.value("material", json{{"lambda", 1.0}, {"mu", 1.0}});
    check_keys(mat, {"lambda", "mu", "E", "nu", "grading"}, "material");
    IsotropicMaterial base;
    if (mat.contains("E") || mat.contains("nu")) {
      if (mat.contains("lambda") || mat.contains("mu")) {
        throw ConfigError("material: give either (lambda, mu) or (E, nu)");
      }
      base = IsotropicMaterial::from_young_poisson(get_or<double>(mat, "E", 1.0),
                                                   get_or<double>(mat, "nu", 0.3));
    } else {
      base = {get_or<double>(mat, "lambda", 1.0), get_or<double>(mat, "mu", 1.0)};
    }
    auto g = get_or<std::vector<double>>(mat, "grading", {0.0, 0.0, 0.0});
    if (g.size() != 3) throw ConfigError("material grading needs three coefficients");
    cfg.material = MaterialField(base, L, {g[0], g[1], g[2]});
    r["material"] = {{"lambda", base.lambda}, {"mu", base.mu}, {"grading", g}};

    // Loads.
    const json loads = j.value("loads", json::object());
    check_keys(loads, {"f2", "f3"}, "loads");
    json rl;
    cfg.loads.f2 = parse_function(loads.value("f2", json(0.0)), rl["f2"]);
    cfg.loads.f3 = parse_function(loads.value("f3", json(0.0)), rl["f3"]);
    r["loads"] = rl;

    // Boundary condition.
    const json bcj = j.value("boundary", json("clamped-both"));
    std::string kind;
    std::vector<double> left(6, 0.0), right(6, 0.0);
    if (bcj.is_string()) {
      kind = bcj.get<std::string>();
    } else {
      check_keys(bcj, {"kind", "left", "right"}, "boundary");
      kind = bcj.value("kind", "clamped-both");
      left = get_or<std::vector<double>>(bcj, "left", left);
      right = get_or<std::vector<double>>(bcj, "right", right);
      if (left.size() != 6 || right.size() != 6) {
        throw ConfigError("boundary values are [u, v2, v2', v3, v3', w]");
      }
    }
    if (kind == "free") {
      cfg.bc.kind = BoundaryKind::Free;
    } else if (kind == "clamped-left") {
      cfg.bc.kind = BoundaryKind::ClampedLeft;
    } else if (kind == "clamped-both") {
      cfg.bc.kind = BoundaryKind::ClampedBoth;
    } else {
      throw ConfigError("unknown boundary kind '" + kind + "'");
    }
    std::copy(left.begin(), left.end(), cfg.bc.left.begin());
    std::copy(right.begin(), right.end(), cfg.bc.right.begin());
    r["boundary"] = {{"kind", kind}, {"left", left}, {"right", right}};

    // Discretization.
    const json disc = j.value("discretization", json::object());
    check_keys(disc, {"elements", "section_edge", "stiffness"}, "discretization");
    cfg.elements = get_or<int>(disc, "elements", 64);
    if (cfg.elements < 1) throw ConfigError("discretization.elements must be positive");
    cfg.section_edge = get_or<double>(disc, "section_edge", 0.05 * cfg.section->diameter());
    if (!(cfg.section_edge > 0)) throw ConfigError("section_edge must be positive");
    cfg.stiffness = disc.value("stiffness", "auto");
    if (cfg.stiffness != "auto" && cfg.stiffness != "closed-form" && cfg.stiffness != "cell") {
      throw ConfigError("stiffness must be auto, closed-form or cell");
    }
    r["discretization"] = {{"elements", cfg.elements},
                           {"section_edge", cfg.section_edge},
                           {"stiffness", cfg.stiffness}};

    // Solver.
    const json sol = j.value("solver", json::object());
    check_keys(sol, {"tol", "max_iter", "contraction", "sufficient_decrease", "continuation_steps"},
               "solver");
    cfg.solver.tol = get_or<double>(sol, "tol", 1e-9);
    cfg.solver.max_iter = get_or<int>(sol, "max_iter", 50);
    cfg.solver.contraction = get_or<double>(sol, "contraction", 0.5);
    cfg.solver.sufficient_decrease = get_or<double>(sol, "sufficient_decrease", 1e-4);
    cfg.solver.continuation_steps = get_or<int>(sol, "continuation_steps", 1);
    if (!(cfg.solver.tol > 0) || cfg.solver.max_iter < 1 || cfg.solver.continuation_steps < 1 ||
        !(cfg.solver.contraction > 0 && cfg.solver.contraction < 1) ||
        !(cfg.solver.sufficient_decrease > 0 && cfg.solver.sufficient_decrease < 1)) {
      throw ConfigError("solver options out of range");
    }
    r["solver"] = {{"tol", cfg.solver.tol},
                   {"max_iter", cfg.solver.max_iter},
                   {"contraction", cfg.solver.contraction},
                   {"sufficient_decrease", cfg.solver.sufficient_decrease},
                   {"continuation_steps", cfg.solver.continuation_steps}};

    const json srep = j.value("section_report", json::object());
    check_keys(srep, {"rotations"}, "section_report");
    cfg.rotations = number_list(srep, "rotations", {0.0});
    r["section_report"] = {{"rotations", cfg.rotations}};

    const json fc = j.value("frenet_check", json::object());
    check_keys(fc, {"h", "x1_samples"}, "frenet_check");
    cfg.frenet_h = number_list(fc, "h", cfg.frenet_h);
    cfg.frenet_x1_samples = get_or<int>(fc, "x1_samples", 41);
    if (cfg.frenet_x1_samples < 2) throw ConfigError("frenet_check.x1_samples must be >= 2");
    r["frenet_check"] = {{"h", cfg.frenet_h}, {"x1_samples", cfg.frenet_x1_samples}};

    const json gc = j.value("gradcheck", json::object());
    check_keys(gc, {"samples", "seed", "amplitude", "elements"}, "gradcheck");
    cfg.gradcheck_samples = get_or<int>(gc, "samples", 20);
    cfg.gradcheck_seed = get_or<unsigned>(gc, "seed", 1u);
    cfg.gradcheck_amplitude = get_or<double>(gc, "amplitude", 0.1);
    cfg.gradcheck_elements = get_or<int>(gc, "elements", 8);
    if (cfg.gradcheck_samples < 1 || cfg.gradcheck_elements < 1) {
      throw ConfigError("gradcheck needs positive samples and elements");
    }
    r["gradcheck"] = {{"samples", cfg.gradcheck_samples},
                      {"seed", cfg.gradcheck_seed},
                      {"amplitude", cfg.gradcheck_amplitude},
                      {"elements", cfg.gradcheck_elements}};

    const json gm = j.value("gamma_check", json::object());
    check_keys(gm, {"h", "state", "warp", "x1_elements", "x1_order", "section_edge"},
               "gamma_check");
    cfg.gamma.h = number_list(gm, "h", cfg.gamma.h);
    for (double h : cfg.gamma.h) {
      if (!(h > 0)) throw ConfigError("gamma_check.h entries must be positive");
    }
    const json st = gm.value("state", json::object());
    check_keys(st, {"u", "v2", "v3", "w"}, "gamma_check.state");
    json rs;
    cfg.gamma.state.u = parse_function(st.value("u", json(0.0)), rs["u"]);
    cfg.gamma.state.v2 = parse_function(st.value("v2", json(0.0)), rs["v2"]);
    cfg.gamma.state.v3 = parse_function(st.value("v3", json(0.0)), rs["v3"]);
    cfg.gamma.state.w = parse_function(st.value("w", json(0.0)), rs["w"]);
    const json wp = gm.value("warp", json::object());
    check_keys(wp, {"terms", "project"}, "gamma_check.warp");
    cfg.gamma.project = wp.value("project", true);
    json terms = json::array();
    for (const auto& t : wp.value("terms", json::array())) {
      check_keys(t, {"component", "powers", "coeff"}, "warp term");
      WarpTerm term;
      term.component = get_or<int>(t, "component", 1) - 1;
      auto pw = get_or<std::vector<int>>(t, "powers", {0, 0});
      if (pw.size() != 2) throw ConfigError("warp term powers are [a, b]");
      term.a = pw[0];
      term.b = pw[1];
      json rcoef;
      term.coeff = parse_function(t.value("coeff", json(0.0)), rcoef);
      if (term.component < 0 || term.component > 2 || term.a < 0 || term.b < 0) {
        throw ConfigError("warp term needs component in 1..3 and nonnegative powers");
      }
      cfg.gamma.warp_terms.push_back(term);
      terms.push_back({{"component", term.component + 1}, {"powers", pw}, {"coeff", rcoef}});
    }
    cfg.gamma.quad.x1_elements = get_or<int>(gm, "x1_elements", 32);
    cfg.gamma.quad.x1_order = get_or<int>(gm, "x1_order", 6);
    if (cfg.gamma.quad.x1_elements < 1 || cfg.gamma.quad.x1_order < 1) {
      throw ConfigError("gamma_check quadrature sizes must be positive");
    }
    cfg.gamma.section_edge = get_or<double>(gm, "section_edge", 0.1 * cfg.section->diameter());
    if (!(cfg.gamma.section_edge > 0)) throw ConfigError("gamma_check.section_edge must be positive");
    r["gamma_check"] = {{"h", cfg.gamma.h},
                        {"state", rs},
                        {"warp", {{"project", cfg.gamma.project}, {"terms", terms}}},
                        {"x1_elements", cfg.gamma.quad.x1_elements},
                        {"x1_order", cfg.gamma.quad.x1_order},
                        {"section_edge", cfg.gamma.section_edge}};
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  json j;
  try {
    j = json::parse(in, nullptr, true, true);
  } catch (const json::exception& e) {
    throw ConfigError("config is not valid JSON: " + std::string(e.what()));
  }
  return parse_config(j);
}

}  // namespace gammarod
