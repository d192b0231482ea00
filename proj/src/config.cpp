#include <chisel/config.hpp>

#include <algorithm>
#include <cmath>
#include <set>

namespace chisel {

using nlohmann::json;

namespace {

using Code = ValidationError::Code;

struct Ctx {
  std::vector<ValidationError>* errs;
  void fail(const std::string& where, const std::string& msg) {
    errs->push_back({Code::ParseError, where.empty() ? msg : where + ": " + msg});
  }
};

void check_keys(Ctx& ctx, const json& obj, const std::string& where,
                const std::set<std::string>& allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key())) ctx.fail(where, "unknown key \"" + it.key() + "\"");
  }
}

double get_num(Ctx& ctx, const json& obj, const std::string& where, const std::string& key,
               double def) {
  if (!obj.contains(key)) return def;
  const json& v = obj.at(key);
  if (!v.is_number()) {
    ctx.fail(where.empty() ? key : where + "." + key, "expected a number");
    return def;
  }
  return v.get<double>();
}

int get_int(Ctx& ctx, const json& obj, const std::string& where, const std::string& key, int def) {
  if (!obj.contains(key)) return def;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) {
    ctx.fail(where.empty() ? key : where + "." + key, "expected an integer");
    return def;
  }
  return v.get<int>();
}

std::string get_str(Ctx& ctx, const json& obj, const std::string& where, const std::string& key,
                    const std::string& def) {
  if (!obj.contains(key)) return def;
  const json& v = obj.at(key);
  if (!v.is_string()) {
    ctx.fail(where.empty() ? key : where + "." + key, "expected a string");
    return def;
  }
  return v.get<std::string>();
}

json profile_json(const FieldProfile& p) {
  switch (p.kind) {
    case FieldProfile::Kind::Constant:
      return {{"kind", "constant"}, {"value", p.value}};
    case FieldProfile::Kind::Fourier:
      return {{"kind", "fourier"}, {"amplitude", p.amplitude}, {"mode", p.mode}};
    case FieldProfile::Kind::YLinear:
      return {{"kind", "ylinear"}, {"offset", p.offset}, {"slope", p.slope}};
    case FieldProfile::Kind::FourierXY:
      return {{"kind", "fourier_xy"}, {"amplitude", p.amplitude}, {"mode", p.mode}};
  }
  return json::object();
}

FieldProfile parse_profile(Ctx& ctx, const json& obj, const std::string& where) {
  if (!obj.is_object()) {
    ctx.fail(where, "expected an object");
    return FieldProfile::constant(0.0);
  }
  std::string kind = get_str(ctx, obj, where, "kind", "constant");
  if (kind == "constant") {
    check_keys(ctx, obj, where, {"kind", "value"});
    return FieldProfile::constant(get_num(ctx, obj, where, "value", 0.0));
  }
  if (kind == "fourier") {
    check_keys(ctx, obj, where, {"kind", "amplitude", "mode"});
    return FieldProfile::fourier(get_num(ctx, obj, where, "amplitude", 0.0),
                                 get_int(ctx, obj, where, "mode", 1));
  }
  if (kind == "ylinear") {
    check_keys(ctx, obj, where, {"kind", "offset", "slope"});
    return FieldProfile::ylinear(get_num(ctx, obj, where, "offset", 0.0),
                                 get_num(ctx, obj, where, "slope", 0.0));
  }
  if (kind == "fourier_xy") {
    check_keys(ctx, obj, where, {"kind", "amplitude", "mode"});
    return FieldProfile::fourier_xy(get_num(ctx, obj, where, "amplitude", 0.0),
                                    get_int(ctx, obj, where, "mode", 1));
  }
  ctx.fail(where + ".kind", "unknown profile kind \"" + kind + "\"");
  return FieldProfile::constant(0.0);
}

// base/rate profile arrays; when the document carries no "base" entry,
// default_base (if any) is used
void parse_affine(Ctx& ctx, const json& doc, const std::string& key,
                  std::vector<FieldProfile>& base, std::vector<FieldProfile>& rate,
                  const std::vector<FieldProfile>& default_base) {
  if (!doc.contains(key)) {
    base = default_base;
    return;
  }
  const json& obj = doc.at(key);
  if (!obj.is_object()) {
    ctx.fail(key, "expected an object with \"base\"/\"rate\" arrays");
    return;
  }
  check_keys(ctx, obj, key, {"base", "rate"});
  if (obj.contains("base")) {
    const json& arr = obj.at("base");
    if (!arr.is_array()) {
      ctx.fail(key + ".base", "expected an array of profiles");
    } else {
      for (size_t k = 0; k < arr.size(); ++k)
        base.push_back(parse_profile(ctx, arr[k], key + ".base[" + std::to_string(k) + "]"));
    }
  } else {
    base = default_base;
  }
  if (obj.contains("rate")) {
    const json& arr = obj.at("rate");
    if (!arr.is_array()) {
      ctx.fail(key + ".rate", "expected an array of profiles");
    } else {
      for (size_t k = 0; k < arr.size(); ++k)
        rate.push_back(parse_profile(ctx, arr[k], key + ".rate[" + std::to_string(k) + "]"));
    }
  }
}

json affine_json(const std::vector<FieldProfile>& base, const std::vector<FieldProfile>& rate) {
  json b = json::array(), r = json::array();
  for (const auto& p : base) b.push_back(profile_json(p));
  for (const auto& p : rate) r.push_back(profile_json(p));
  return {{"base", b}, {"rate", r}};
}

MonotoneGraph parse_graph(Ctx& ctx, const json& obj, const std::string& where, json& resolved) {
  std::string kind = get_str(ctx, obj, where, "kind", "polynomial");
  try {
    if (kind == "polynomial") {
      check_keys(ctx, obj, where, {"kind", "odd_coeffs"});
      std::vector<double> coeffs = {0.0, 1.0};
      if (obj.contains("odd_coeffs")) {
        coeffs.clear();
        for (const auto& c : obj.at("odd_coeffs")) coeffs.push_back(c.get<double>());
      }
      resolved = {{"kind", "polynomial"}, {"odd_coeffs", coeffs}};
      return MonotoneGraph::polynomial(coeffs);
    }
    if (kind == "logarithmic") {
      check_keys(ctx, obj, where, {"kind"});
      resolved = {{"kind", "logarithmic"}};
      return MonotoneGraph::logarithmic();
    }
    if (kind == "indicator") {
      check_keys(ctx, obj, where, {"kind", "a", "b"});
      double a = get_num(ctx, obj, where, "a", -1.0);
      double b = get_num(ctx, obj, where, "b", 1.0);
      resolved = {{"kind", "indicator"}, {"a", a}, {"b", b}};
      return MonotoneGraph::indicator(a, b);
    }
    ctx.fail(where + ".kind", "unknown graph kind \"" + kind + "\"");
  } catch (const std::exception& e) {
    ctx.fail(where, e.what());
  }
  resolved = {{"kind", "polynomial"}, {"odd_coeffs", {0.0, 1.0}}};
  return MonotoneGraph::polynomial({0.0, 1.0});
}

LipschitzPerturbation parse_pi(Ctx& ctx, const json& obj, const std::string& where,
                               json& resolved) {
  std::string kind = get_str(ctx, obj, where, "kind", "linear");
  try {
    if (kind == "linear") {
      check_keys(ctx, obj, where, {"kind", "slope"});
      double s = get_num(ctx, obj, where, "slope", -1.0);
      resolved = {{"kind", "linear"}, {"slope", s}};
      return LipschitzPerturbation::linear(s);
    }
    if (kind == "affine_truncated") {
      check_keys(ctx, obj, where, {"kind", "slope", "lo", "hi"});
      double s = get_num(ctx, obj, where, "slope", -1.0);
      double lo = get_num(ctx, obj, where, "lo", -1.0);
      double hi = get_num(ctx, obj, where, "hi", 1.0);
      resolved = {{"kind", "affine_truncated"}, {"slope", s}, {"lo", lo}, {"hi", hi}};
      return LipschitzPerturbation::affine_truncated(s, lo, hi);
    }
    ctx.fail(where + ".kind", "unknown perturbation kind \"" + kind + "\"");
  } catch (const std::exception& e) {
    ctx.fail(where, e.what());
  }
  resolved = {{"kind", "linear"}, {"slope", -1.0}};
  return LipschitzPerturbation::linear(-1.0);
}

PotentialPair parse_potential(Ctx& ctx, const json& obj, json& resolved) {
  const std::string where = "potential";
  PotentialPair pair;
  std::string preset = get_str(ctx, obj, where, "preset", "regular");
  pair.eta = get_num(ctx, obj, where, "eta", 1.0);
  pair.c_compat = get_num(ctx, obj, where, "c_compat", 0.0);
  if (!(pair.eta > 0.0)) ctx.fail(where + ".eta", "eta must be positive");
  if (pair.c_compat < 0.0) ctx.fail(where + ".c_compat", "c_compat must be nonnegative");
  resolved = {{"preset", preset}, {"eta", pair.eta}, {"c_compat", pair.c_compat}};

  double cb = get_num(ctx, obj, where, "c_bulk", 1.0);
  double cg = get_num(ctx, obj, where, "c_boundary", 1.0);

  auto with_c = [&]() {
    check_keys(ctx, obj, where, {"preset", "eta", "c_compat", "c_bulk", "c_boundary"});
    resolved["c_bulk"] = cb;
    resolved["c_boundary"] = cg;
  };

  if (preset == "regular") {
    check_keys(ctx, obj, where, {"preset", "eta", "c_compat"});
    pair.bulk_graph = MonotoneGraph::polynomial({0.0, 1.0});
    pair.boundary_graph = MonotoneGraph::polynomial({0.0, 1.0});
    pair.bulk_pi = LipschitzPerturbation::linear(-1.0);
    pair.boundary_pi = LipschitzPerturbation::linear(-1.0);
  } else if (preset == "double_obstacle") {
    with_c();
    pair.bulk_graph = MonotoneGraph::indicator(-1.0, 1.0);
    pair.boundary_graph = MonotoneGraph::indicator(-1.0, 1.0);
    pair.bulk_pi = LipschitzPerturbation::linear(-2.0 * cb);
    pair.boundary_pi = LipschitzPerturbation::linear(-2.0 * cg);
  } else if (preset == "logarithmic") {
    with_c();
    pair.bulk_graph = MonotoneGraph::logarithmic();
    pair.boundary_graph = MonotoneGraph::logarithmic();
    pair.bulk_pi = LipschitzPerturbation::linear(-2.0 * cb);
    pair.boundary_pi = LipschitzPerturbation::linear(-2.0 * cg);
  } else if (preset == "obstacle_log") {
    with_c();
    pair.bulk_graph = MonotoneGraph::indicator(-1.0, 1.0);
    pair.boundary_graph = MonotoneGraph::logarithmic();
    pair.bulk_pi = LipschitzPerturbation::linear(-2.0 * cb);
    pair.boundary_pi = LipschitzPerturbation::linear(-2.0 * cg);
  } else if (preset == "log_obstacle_invalid") {
    // deliberately invalid: singular bulk against a bounded boundary graph
    with_c();
    pair.bulk_graph = MonotoneGraph::logarithmic();
    pair.boundary_graph = MonotoneGraph::indicator(-1.0, 1.0);
    pair.bulk_pi = LipschitzPerturbation::linear(-2.0 * cb);
    pair.boundary_pi = LipschitzPerturbation::linear(-2.0 * cg);
  } else if (preset == "custom") {
    check_keys(ctx, obj, where, {"preset", "eta", "c_compat", "bulk", "boundary"});
    for (const char* side : {"bulk", "boundary"}) {
      json rg = {{"kind", "polynomial"}, {"odd_coeffs", {0.0, 1.0}}};
      json rp = {{"kind", "linear"}, {"slope", -1.0}};
      MonotoneGraph gph = MonotoneGraph::polynomial({0.0, 1.0});
      LipschitzPerturbation pi = LipschitzPerturbation::linear(-1.0);
      if (obj.contains(side)) {
        const json& sobj = obj.at(side);
        check_keys(ctx, sobj, where + "." + side, {"graph", "pi"});
        if (sobj.contains("graph"))
          gph = parse_graph(ctx, sobj.at("graph"), where + "." + side + ".graph", rg);
        if (sobj.contains("pi")) pi = parse_pi(ctx, sobj.at("pi"), where + "." + side + ".pi", rp);
      }
      resolved[side] = {{"graph", rg}, {"pi", rp}};
      if (std::string(side) == "bulk") {
        pair.bulk_graph = gph;
        pair.bulk_pi = pi;
      } else {
        pair.boundary_graph = gph;
        pair.boundary_pi = pi;
      }
    }
  } else {
    ctx.fail(where + ".preset", "unknown potential preset \"" + preset + "\"");
  }
  return pair;
}

std::vector<FieldProfile> parse_y0(Ctx& ctx, const json& obj, json& resolved) {
  const std::string where = "y0";
  std::string kind = get_str(ctx, obj, where, "kind", "cosine_x");
  if (kind == "constant") {
    check_keys(ctx, obj, where, {"kind", "value"});
    double v = get_num(ctx, obj, where, "value", 0.0);
    resolved = {{"kind", "constant"}, {"value", v}};
    return {FieldProfile::constant(v)};
  }
  if (kind == "cosine_x" || kind == "cosine_xy") {
    check_keys(ctx, obj, where, {"kind", "mean", "amplitude", "mode"});
    double mean = get_num(ctx, obj, where, "mean", 0.0);
    double amp = get_num(ctx, obj, where, "amplitude", 0.2);
    int mode = get_int(ctx, obj, where, "mode", 1);
    resolved = {{"kind", kind}, {"mean", mean}, {"amplitude", amp}, {"mode", mode}};
    std::vector<FieldProfile> out;
    if (mean != 0.0) out.push_back(FieldProfile::constant(mean));
    out.push_back(kind == "cosine_x" ? FieldProfile::fourier(amp, mode)
                                     : FieldProfile::fourier_xy(amp, mode));
    return out;
  }
  ctx.fail(where + ".kind", "unknown y0 kind \"" + kind + "\"");
  resolved = {{"kind", "constant"}, {"value", 0.0}};
  return {FieldProfile::constant(0.0)};
}

}  // namespace

json default_config_doc() {
  ConfigParseResult base = parse_config("{}", false);
  return base.parsed.resolved;
}

void apply_override(json& doc, const std::string& dotted_key, const std::string& raw_value,
                    const json* skeleton) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : dotted_key) {
    if (c == '.') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  if (parts.empty() || parts.front().empty())
    throw std::invalid_argument("override: empty key in \"" + dotted_key + "\"");

  json* node = &doc;
  const json* skel = skeleton;
  for (size_t k = 0; k + 1 < parts.size(); ++k) {
    const json* skel_next = nullptr;
    if (skel && skel->is_object() && skel->contains(parts[k])) skel_next = &skel->at(parts[k]);
    if (!node->is_object())
      throw std::invalid_argument("override: \"" + dotted_key + "\" does not address an object");
    if (!node->contains(parts[k])) {
      if (skel_next && skel_next->is_object())
        (*node)[parts[k]] = json::object();
      else
        throw std::invalid_argument("override: no such key path \"" + dotted_key + "\"");
    }
    node = &(*node)[parts[k]];
    skel = skel_next;
  }
  if (!node->is_object())
    throw std::invalid_argument("override: \"" + dotted_key + "\" does not address an object");

  json val;
  try {
    val = json::parse(raw_value);
  } catch (...) {
    val = raw_value;  // bare strings allowed
  }
  (*node)[parts.back()] = val;
}

ConfigParseResult parse_config(const std::string& text, bool run_validators) {
  ConfigParseResult res;
  Ctx ctx{&res.errors};

  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    ctx.fail("", std::string("invalid JSON: ") + e.what());
    return res;
  }
  if (!doc.is_object()) {
    ctx.fail("", "top-level config must be a JSON object");
    return res;
  }

  check_keys(ctx, doc, "",
             {"tau", "eps", "dt", "t_final", "mode", "grid", "potential", "y0", "lambda",
              "lambda_gamma", "g", "g_gamma", "newton", "eps_list", "perturb", "convergence"});

  json resolved = json::object();
  RunConfig& cfg = res.parsed.config;
  cfg.tau = get_num(ctx, doc, "", "tau", 1.0);
  cfg.eps = get_num(ctx, doc, "", "eps", 0.1);
  cfg.dt = get_num(ctx, doc, "", "dt", 1e-3);
  cfg.t_final = get_num(ctx, doc, "", "t_final", 0.1);
  if (!(cfg.eps > 0.0 && cfg.eps < 1.0)) ctx.fail("eps", "eps must lie in (0,1)");
  if (!(cfg.dt > 0.0)) ctx.fail("dt", "dt must be positive");
  if (cfg.tau < 0.0) ctx.fail("tau", "tau must be nonnegative");
  if (cfg.t_final < 0.0) ctx.fail("t_final", "t_final must be nonnegative");
  resolved["tau"] = cfg.tau;
  resolved["eps"] = cfg.eps;
  resolved["dt"] = cfg.dt;
  resolved["t_final"] = cfg.t_final;

  std::string mode = get_str(ctx, doc, "", "mode", "nonlinear");
  if (mode == "nonlinear")
    cfg.mode = SolveMode::Nonlinear;
  else if (mode == "linearized")
    cfg.mode = SolveMode::Linearized;
  else
    ctx.fail("mode", "must be \"nonlinear\" or \"linearized\"");
  resolved["mode"] = mode;

  {
    json gobj = doc.value("grid", json::object());
    check_keys(ctx, gobj, "grid", {"nx", "ny", "lx", "ly"});
    int nx = get_int(ctx, gobj, "grid", "nx", 64);
    int ny = get_int(ctx, gobj, "grid", "ny", 32);
    double lx = get_num(ctx, gobj, "grid", "lx", 1.0);
    double ly = get_num(ctx, gobj, "grid", "ly", 0.5);
    resolved["grid"] = {{"nx", nx}, {"ny", ny}, {"lx", lx}, {"ly", ly}};
    try {
      cfg.grid = StripGrid(nx, ny, lx, ly);
    } catch (const std::exception& e) {
      ctx.fail("grid", e.what());
    }
  }

  {
    json rp;
    cfg.pair = parse_potential(ctx, doc.value("potential", json::object()), rp);
    resolved["potential"] = rp;
  }
  {
    json ry;
    cfg.y0 = parse_y0(ctx, doc.value("y0", json::object()), ry);
    resolved["y0"] = ry;
  }

  parse_affine(ctx, doc, "lambda", cfg.lambda.base, cfg.lambda.rate,
               {FieldProfile::constant(1.0)});
  parse_affine(ctx, doc, "lambda_gamma", cfg.lambda_gamma.base, cfg.lambda_gamma.rate,
               {FieldProfile::constant(1.0)});
  parse_affine(ctx, doc, "g", cfg.g.base, cfg.g.rate, {});
  parse_affine(ctx, doc, "g_gamma", cfg.g_gamma.base, cfg.g_gamma.rate, {});
  resolved["lambda"] = affine_json(cfg.lambda.base, cfg.lambda.rate);
  resolved["lambda_gamma"] = affine_json(cfg.lambda_gamma.base, cfg.lambda_gamma.rate);
  resolved["g"] = affine_json(cfg.g.base, cfg.g.rate);
  resolved["g_gamma"] = affine_json(cfg.g_gamma.base, cfg.g_gamma.rate);

  {
    json nobj = doc.value("newton", json::object());
    check_keys(ctx, nobj, "newton", {"max_iter", "tol", "initial_guess"});
    cfg.newton.max_iter = get_int(ctx, nobj, "newton", "max_iter", 30);
    cfg.newton.tol = get_num(ctx, nobj, "newton", "tol", 1e-10);
    std::string guess = get_str(ctx, nobj, "newton", "initial_guess", "previous");
    if (guess == "previous")
      cfg.newton.initial_guess = NewtonGuess::Previous;
    else if (guess == "mean")
      cfg.newton.initial_guess = NewtonGuess::Mean;
    else
      ctx.fail("newton.initial_guess", "must be \"previous\" or \"mean\"");
    if (cfg.newton.max_iter < 1) ctx.fail("newton.max_iter", "must be >= 1");
    if (!(cfg.newton.tol > 0.0)) ctx.fail("newton.tol", "must be positive");
    resolved["newton"] = {{"max_iter", cfg.newton.max_iter},
                          {"tol", cfg.newton.tol},
                          {"initial_guess", guess}};
  }

  if (doc.contains("eps_list")) {
    res.parsed.eps_list.clear();
    if (!doc.at("eps_list").is_array()) {
      ctx.fail("eps_list", "expected an array of numbers");
    } else {
      for (const auto& e : doc.at("eps_list")) {
        if (!e.is_number()) {
          ctx.fail("eps_list", "entries must be numbers");
          break;
        }
        res.parsed.eps_list.push_back(e.get<double>());
      }
    }
  }
  resolved["eps_list"] = res.parsed.eps_list;

  {
    json pobj = doc.value("perturb", json::object());
    check_keys(ctx, pobj, "perturb", {"target", "delta", "shape"});
    res.parsed.perturb.target = get_str(ctx, pobj, "perturb", "target", "g");
    res.parsed.perturb.delta = get_num(ctx, pobj, "perturb", "delta", 0.1);
    if (pobj.contains("shape"))
      res.parsed.perturb.shape = parse_profile(ctx, pobj.at("shape"), "perturb.shape");
    if (res.parsed.perturb.target != "g" && res.parsed.perturb.target != "g_gamma")
      ctx.fail("perturb.target", "must be \"g\" or \"g_gamma\"");
    resolved["perturb"] = {{"target", res.parsed.perturb.target},
                           {"delta", res.parsed.perturb.delta},
                           {"shape", profile_json(res.parsed.perturb.shape)}};
  }

  {
    json cobj = doc.value("convergence", json::object());
    check_keys(ctx, cobj, "convergence",
               {"t_final", "dt_list", "time_grid", "space_grids", "space_dt_list", "lambda",
                "lambda_gamma"});
    ConvergenceSpec& cs = res.parsed.convergence;
    cs.t_final = get_num(ctx, cobj, "convergence", "t_final", 0.096);
    cs.lambda_value = get_num(ctx, cobj, "convergence", "lambda", 1.0);
    cs.lambda_gamma_value = get_num(ctx, cobj, "convergence", "lambda_gamma", 1.0);
    if (cobj.contains("dt_list")) {
      cs.dt_list.clear();
      for (const auto& e : cobj.at("dt_list")) cs.dt_list.push_back(e.get<double>());
    }
    if (cobj.contains("time_grid")) {
      const auto& tg = cobj.at("time_grid");
      if (tg.is_array() && tg.size() == 2) {
        cs.time_nx = tg[0].get<int>();
        cs.time_ny = tg[1].get<int>();
      } else {
        ctx.fail("convergence.time_grid", "expected [nx, ny]");
      }
    }
    if (cobj.contains("space_grids")) {
      cs.space_grids.clear();
      for (const auto& e : cobj.at("space_grids")) {
        if (!e.is_array() || e.size() != 2) {
          ctx.fail("convergence.space_grids", "expected entries [nx, ny]");
          break;
        }
        cs.space_grids.emplace_back(e[0].get<int>(), e[1].get<int>());
      }
    }
    if (cobj.contains("space_dt_list")) {
      cs.space_dt_list.clear();
      for (const auto& e : cobj.at("space_dt_list")) cs.space_dt_list.push_back(e.get<double>());
    }
    if (cs.space_dt_list.size() != cs.space_grids.size())
      ctx.fail("convergence", "space_dt_list and space_grids must have equal length");
    json sg = json::array();
    for (auto& [a, b] : cs.space_grids) sg.push_back({a, b});
    resolved["convergence"] = {{"t_final", cs.t_final},
                               {"dt_list", cs.dt_list},
                               {"time_grid", {cs.time_nx, cs.time_ny}},
                               {"space_grids", sg},
                               {"space_dt_list", cs.space_dt_list},
                               {"lambda", cs.lambda_value},
                               {"lambda_gamma", cs.lambda_gamma_value}};
  }

  res.parsed.resolved = std::move(resolved);
  if (!res.errors.empty()) return res;

  if (run_validators) {
    auto verrs = validate_config(cfg);
    res.errors.insert(res.errors.end(), verrs.begin(), verrs.end());
    if (!res.errors.empty()) return res;
  }

  res.ok = true;
  return res;
}

}  // namespace chisel
