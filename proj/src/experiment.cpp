#include <chisel/experiment.hpp>

#include <chisel/diagnostics.hpp>
#include <chisel/field_io.hpp>

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <thread>

namespace chisel {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path.string());
  os << text;
}

void write_json(const fs::path& path, const json& doc) { write_text(path, doc.dump(2) + "\n"); }

void write_manifest(const fs::path& dir, const json& resolved, const ExperimentSpec& spec,
                    const json& extra = json::object()) {
  json m;
  m["command"] = spec.command;
  m["save_every"] = spec.save_every;
  m["workers"] = spec.workers;
  m["threads_per_run"] = 1;
  m["config"] = resolved;
  for (auto it = extra.begin(); it != extra.end(); ++it) m[it.key()] = it.value();
  write_json(dir / "manifest.json", m);
}

void write_run_artifacts(const fs::path& dir, const RunConfig& cfg, const RunResult& result,
                         int save_every) {
  fs::create_directories(dir);
  result.diagnostics.write_csv((dir / "diagnostics.csv").string());
  for (size_t k = 0; k < result.snapshots.size(); ++k) {
    int stepno = result.snapshot_steps[k];
    if (!(stepno % std::max(1, save_every) == 0 || stepno == result.steps || stepno == 0)) continue;
    char name[64];
    std::snprintf(name, sizeof(name), "snap_%06d", stepno);
    const State& s = result.snapshots[k];
    write_field_binary((dir / (std::string(name) + ".bin")).string(), cfg.grid, s.y, s.time);
    write_field_csv((dir / (std::string(name) + ".csv")).string(), cfg.grid, s.y);
  }
}

// Bounded pool; jobs indexed for deterministic result placement.
void run_parallel(std::vector<std::function<void()>>& jobs, int workers) {
  workers = std::max(1, std::min<int>(workers, static_cast<int>(jobs.size())));
  if (workers == 1) {
    for (auto& j : jobs) j();
    return;
  }
  std::atomic<size_t> next{0};
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(jobs.size());
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      while (true) {
        size_t k = next.fetch_add(1);
        if (k >= jobs.size()) return;
        try {
          jobs[k]();
        } catch (...) {
          errors[k] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

json eps_distances_json(const EpsStudyResult& study) {
  json arr = json::array();
  for (const auto& d : study.distances) {
    arr.push_back({{"eps_coarse", d.eps_coarse},
                   {"eps_fine", d.eps_fine},
                   {"dist_linf_h", d.dist_linf_h},
                   {"dist_l2_v", d.dist_l2_v},
                   {"dist_linf_dual", d.dist_linf_dual}});
  }
  return arr;
}

std::string scale_tag(double s) {
  std::ostringstream os;
  os << s;
  return os.str();
}

int classify_exit(const std::exception& e) {
  if (dynamic_cast<const NewtonDivergenceError*>(&e)) return 3;
  if (dynamic_cast<const InvariantViolationError*>(&e)) return 4;
  if (dynamic_cast<const ConfigError*>(&e)) return 2;
  if (dynamic_cast<const ConfigMismatchError*>(&e)) return 2;
  return 1;
}

}  // namespace

RunConfig manufactured_config(const RunConfig& base, const ConvergenceSpec& spec, int nx, int ny,
                              double dt) {
  RunConfig cfg = base;
  cfg.mode = SolveMode::Linearized;
  cfg.grid = StripGrid(nx, ny, base.grid.lx, base.grid.ly);
  cfg.dt = dt;
  cfg.t_final = spec.t_final;
  cfg.full_diagnostics = false;  // errors are measured against the exact fields
  cfg.lambda.base = {FieldProfile::constant(spec.lambda_value)};
  cfg.lambda.rate = {};
  cfg.lambda_gamma.base = {FieldProfile::constant(spec.lambda_gamma_value)};
  cfg.lambda_gamma.rate = {};
  cfg.y0 = {FieldProfile::fourier_xy(1.0, 1)};

  const double lx = cfg.grid.lx, ly = cfg.grid.ly;
  const double kx = 2.0 * kPi / lx;
  const double ky = kPi / ly;
  const double ksq = kx * kx + ky * ky;
  const double te = tau_eps(cfg.tau, cfg.eps);
  const double lam = spec.lambda_value;
  const double lam_g = spec.lambda_gamma_value;

  // y(x,y,t) = cos(kx x) cos(ky y) e^{-t}; w = y / ksq solves the flux
  // equation with zero normal flux; sources from the strong equations.
  const double g_factor = ksq + lam - te - 1.0 / ksq;
  const double gg_factor = kx * kx + lam_g - 1.0;

  cfg.g_exact = [g_factor, kx, ky](const StripGrid& g, double t) {
    BulkField f(g.nx, g.ny);
    double decay = std::exp(-t);
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i)
        f.at(i, j) = g_factor * decay * std::cos(kx * i * g.hx) * std::cos(ky * j * g.hy);
    return f;
  };
  cfg.g_gamma_exact = [gg_factor, kx](const StripGrid& g, double t) {
    BoundaryField f(g.nx);
    double decay = std::exp(-t);
    for (int i = 0; i < g.nx; ++i) {
      double cx = std::cos(kx * i * g.hx);
      f.at(0, i) = gg_factor * decay * cx;
      f.at(1, i) = -gg_factor * decay * cx;  // cos(ky*ly) = -1 on the top component
    }
    return f;
  };
  return cfg;
}

double manufactured_error(const RunConfig& cfg, const RunResult& result) {
  const StripGrid& g = cfg.grid;
  const double kx = 2.0 * kPi / g.lx;
  const double ky = kPi / g.ly;
  double err = 0.0;
  for (const auto& s : result.snapshots) {
    BulkField exact(g.nx, g.ny);
    double decay = std::exp(-s.time);
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i)
        exact.at(i, j) = decay * std::cos(kx * i * g.hx) * std::cos(ky * j * g.hy);
    BulkField diff = axpy(-1.0, exact, s.y);
    err = std::max(err, norm_h(g, diff));
  }
  return err;
}

ConvergenceResult convergence_study(const RunConfig& base, const ConvergenceSpec& spec) {
  if (!(base.tau > 0.0))
    throw ConfigError({{ValidationError::Code::BadValue,
                        "convergence study requires tau > 0 (linearized mode)"}});
  ConvergenceResult out;

  // temporal sweep on a fixed grid; spatial error cancels in same-grid
  // successive differences
  std::vector<RunResult> time_runs;
  for (double dt : spec.dt_list) {
    RunConfig cfg = manufactured_config(base, spec, spec.time_nx, spec.time_ny, dt);
    RunResult r = run(cfg, 1);
    ConvergenceCase c;
    c.study = "time";
    c.nx = spec.time_nx;
    c.ny = spec.time_ny;
    c.dt = r.dt_effective;
    c.steps = r.steps;
    c.err_linf_h = manufactured_error(cfg, r);
    out.cases.push_back(c);
    time_runs.push_back(std::move(r));
  }
  std::vector<double> diffs;
  for (size_t k = 0; k + 1 < time_runs.size(); ++k) {
    const RunResult& coarse = time_runs[k];
    const RunResult& fine = time_runs[k + 1];
    int ratio = static_cast<int>(std::llround(static_cast<double>(fine.steps) / coarse.steps));
    if (coarse.steps * ratio != fine.steps)
      throw ConfigError({{ValidationError::Code::BadValue,
                          "convergence.dt_list entries must nest (integer step ratios)"}});
    StripGrid g(spec.time_nx, spec.time_ny, base.grid.lx, base.grid.ly);
    double d = 0.0;
    for (int n = 0; n <= coarse.steps; ++n) {
      BulkField diff = axpy(-1.0, fine.snapshots[static_cast<size_t>(n) * ratio].y,
                            coarse.snapshots[n].y);
      d = std::max(d, norm_h(g, diff));
    }
    out.cases[k].diff_to_finer = d;
    diffs.push_back(d);
  }
  if (diffs.size() >= 2 && diffs.back() > 0.0)
    out.temporal_order = std::log2(diffs[diffs.size() - 2] / diffs.back());

  // spatial sweep with dt tied to h^2
  std::vector<double> space_errors;
  for (size_t k = 0; k < spec.space_grids.size(); ++k) {
    auto [nx, ny] = spec.space_grids[k];
    RunConfig cfg = manufactured_config(base, spec, nx, ny, spec.space_dt_list[k]);
    RunResult r = run(cfg, 1);
    ConvergenceCase c;
    c.study = "space";
    c.nx = nx;
    c.ny = ny;
    c.dt = r.dt_effective;
    c.steps = r.steps;
    c.err_linf_h = manufactured_error(cfg, r);
    out.cases.push_back(c);
    space_errors.push_back(c.err_linf_h);
  }
  for (size_t k = 0; k + 1 < space_errors.size(); ++k) {
    double hc = 1.0 / spec.space_grids[k].first;
    double hf = 1.0 / spec.space_grids[k + 1].first;
    if (space_errors[k + 1] > 0.0)
      out.spatial_orders.push_back(std::log(space_errors[k] / space_errors[k + 1]) /
                                   std::log(hc / hf));
  }
  return out;
}

int run_experiment(const ExperimentSpec& spec) {
  fs::path out(spec.out_dir);
  auto emit_error = [&](int code, const std::string& kind, const std::string& message) {
    json e = {{"error", {{"exit_code", code}, {"kind", kind}, {"message", message}}}};
    std::cerr << e.dump(2) << std::endl;
    try {
      if (!spec.out_dir.empty()) {
        fs::create_directories(out);
        write_json(out / "error.json", e);
      }
    } catch (...) {
    }
    return code;
  };

  // load + override + parse
  std::string text = "{}";
  if (!spec.config_path.empty()) {
    std::ifstream is(spec.config_path);
    if (!is) return emit_error(2, "ConfigError", "cannot read config file " + spec.config_path);
    std::stringstream ss;
    ss << is.rdbuf();
    text = ss.str();
  }

  json doc;
  try {
    doc = json::parse(text);
  } catch (const std::exception& e) {
    return emit_error(2, "ParseError", std::string("invalid JSON: ") + e.what());
  }
  try {
    const json skeleton = default_config_doc();
    for (const auto& [key, val] : spec.overrides) apply_override(doc, key, val, &skeleton);
  } catch (const std::exception& e) {
    return emit_error(2, "ParseError", e.what());
  }

  const bool validators = spec.command != "check-potentials";
  ConfigParseResult parsed = parse_config(doc.dump(), validators);
  if (!parsed.ok) {
    std::string msg = format_errors(parsed.errors);
    return emit_error(2, "ConfigError", msg);
  }
  const RunConfig& cfg = parsed.parsed.config;

  try {
    fs::create_directories(out);
    write_manifest(out, parsed.parsed.resolved, spec);

    if (spec.command == "run") {
      RunResult result = run(cfg, 1);
      write_run_artifacts(out, cfg, result, spec.save_every);
      return 0;
    }

    if (spec.command == "eps-study") {
      const auto& eps_list = parsed.parsed.eps_list;
      // run members concurrently, then the distance pass
      std::vector<RunResult> results(eps_list.size());
      std::vector<std::function<void()>> jobs;
      for (size_t k = 0; k < eps_list.size(); ++k) {
        jobs.push_back([&, k]() {
          RunConfig c = cfg;
          c.eps = eps_list[k];
          results[k] = run(c, 1);
        });
      }
      // validate ordering before spending compute
      for (size_t k = 0; k < eps_list.size(); ++k) {
        if (!(eps_list[k] > 0.0 && eps_list[k] < 1.0) ||
            (k > 0 && !(eps_list[k] < eps_list[k - 1])))
          throw ConfigError({{ValidationError::Code::BadValue,
                              "eps_list must be strictly decreasing within (0,1)"}});
      }
      run_parallel(jobs, spec.workers);

      EpsStudyResult study;
      study.eps_list = eps_list;
      study.runs = std::move(results);
      const StripGrid& g = cfg.grid;
      for (size_t k = 0; k + 1 < study.runs.size(); ++k) {
        EpsDistance dist;
        dist.eps_coarse = eps_list[k];
        dist.eps_fine = eps_list[k + 1];
        double l2v = 0.0;
        for (size_t n = 0; n < study.runs[k].snapshots.size(); ++n) {
          BulkField diff =
              axpy(-1.0, study.runs[k + 1].snapshots[n].y, study.runs[k].snapshots[n].y);
          dist.dist_linf_h = std::max(dist.dist_linf_h, norm_h(g, diff));
          dist.dist_linf_dual = std::max(dist.dist_linf_dual, dual_norm(g, diff));
          if (n > 0) {
            double nv = norm_v(g, diff);
            l2v += study.runs[k].dt_effective * nv * nv;
          }
        }
        dist.dist_l2_v = std::sqrt(l2v);
        study.distances.push_back(dist);
      }

      for (size_t k = 0; k < eps_list.size(); ++k) {
        std::ostringstream name;
        name << "eps_" << eps_list[k];
        fs::path dir = out / name.str();
        RunConfig c = cfg;
        c.eps = eps_list[k];
        write_run_artifacts(dir, c, study.runs[k], spec.save_every);
        json res = parsed.parsed.resolved;
        res["eps"] = eps_list[k];
        write_manifest(dir, res, spec);
      }
      write_json(out / "distances.json", eps_distances_json(study));
      return 0;
    }

    if (spec.command == "perturb-study") {
      const PerturbSpec& ps = parsed.parsed.perturb;
      const std::vector<double> scales = {1.0, 0.5, 0.25};
      std::vector<RunConfig> cfgs;
      cfgs.push_back(cfg);  // base
      for (double s : scales) {
        RunConfig c = cfg;
        FieldProfile shape = ps.shape;
        if (ps.target == "g") {
          shape.amplitude *= ps.delta * s;
          shape.value *= ps.delta * s;
          shape.offset *= ps.delta * s;
          shape.slope *= ps.delta * s;
          c.g.base.push_back(shape);
        } else {
          shape.amplitude *= ps.delta * s;
          shape.value *= ps.delta * s;
          shape.offset *= ps.delta * s;
          shape.slope *= ps.delta * s;
          c.g_gamma.base.push_back(shape);
        }
        cfgs.push_back(c);
      }
      std::vector<RunResult> results(cfgs.size());
      std::vector<std::function<void()>> jobs;
      for (size_t k = 0; k < cfgs.size(); ++k)
        jobs.push_back([&, k]() { results[k] = run(cfgs[k], 1); });
      run_parallel(jobs, spec.workers);

      write_run_artifacts(out / "base", cfgs[0], results[0], spec.save_every);
      write_manifest(out / "base", parsed.parsed.resolved, spec);
      for (size_t k = 0; k < scales.size(); ++k) {
        fs::path dir = out / ("perturb_" + scale_tag(scales[k]));
        write_run_artifacts(dir, cfgs[k + 1], results[k + 1], spec.save_every);
        json extra = {{"applied_perturbation",
                       {{"target", ps.target}, {"delta_effective", ps.delta * scales[k]}}}};
        write_manifest(dir, parsed.parsed.resolved, spec, extra);
        DependenceReport rep = dependence_report(cfgs[0], results[0], cfgs[k + 1], results[k + 1]);
        write_text(out / ("dependence_" + scale_tag(scales[k]) + ".json"), rep.to_json());
      }
      return 0;
    }

    if (spec.command == "convergence") {
      ConvergenceResult conv = convergence_study(cfg, parsed.parsed.convergence);
      std::ostringstream csv;
      csv << "study,nx,ny,dt,steps,err_linf_h,diff_to_finer\n";
      char buf[64];
      for (const auto& c : conv.cases) {
        csv << c.study << "," << c.nx << "," << c.ny << ",";
        std::snprintf(buf, sizeof(buf), "%.17g", c.dt);
        csv << buf << "," << c.steps << ",";
        std::snprintf(buf, sizeof(buf), "%.17g", c.err_linf_h);
        csv << buf << ",";
        std::snprintf(buf, sizeof(buf), "%.17g", c.diff_to_finer);
        csv << buf << "\n";
      }
      write_text(out / "convergence.csv", csv.str());
      json orders = {{"temporal_order", conv.temporal_order},
                     {"spatial_orders", conv.spatial_orders}};
      write_json(out / "orders.json", orders);
      return 0;
    }

    if (spec.command == "check-potentials") {
      auto samples = default_sample_grid(cfg.pair);
      auto eps_list = default_eps_list();
      eps_list.push_back(cfg.eps);
      CompatibilityReport comp = verify_compatibility(cfg.pair, eps_list, samples);
      BulkField y0(cfg.grid.nx, cfg.grid.ny);
      for (int j = 0; j < cfg.grid.ny; ++j)
        for (int i = 0; i < cfg.grid.nx; ++i) {
          double v = 0.0;
          for (const auto& p : cfg.y0) v += p.eval(cfg.grid, i, j);
          y0.at(i, j) = v;
        }
      double m0 = mean_value(cfg.grid, y0);
      json rep;
      rep["compatibility"] = {{"ok", comp.ok},
                              {"domain_inclusion_ok", comp.domain_inclusion_ok},
                              {"max_slack", comp.max_slack},
                              {"witness_r", comp.witness_r},
                              {"witness_eps", comp.witness_eps}};
      bool coercive_ok = false;
      if (cfg.pair.boundary_graph.domain().interior(m0)) {
        try {
          CoercivityConstants cc = verify_coercivity(cfg.pair, m0, eps_list, samples);
          rep["coercivity"] = {{"delta0", cc.delta0}, {"c0", cc.c0}, {"m0", cc.m0}};
          coercive_ok = true;
        } catch (const CoercivityFailureError& e) {
          rep["coercivity"] = {{"failure", e.what()}};
        }
      } else {
        rep["coercivity"] = {{"failure", "m0 not in the interior of D(beta_Gamma)"}};
      }
      bool pass = comp.ok && coercive_ok;
      rep["pass"] = pass;
      write_json(out / "potentials.json", rep);
      return pass ? 0 : 2;
    }

    return emit_error(2, "ConfigError", "unknown command \"" + spec.command + "\"");
  } catch (const std::exception& e) {
    int code = classify_exit(e);
    const char* kind = code == 3   ? "NewtonDivergence"
                       : code == 4 ? "InvariantViolation"
                       : code == 2 ? "ConfigError"
                                   : "InternalError";
    return emit_error(code, kind, e.what());
  }
}

}  // namespace chisel
