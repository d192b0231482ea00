#include <chisel/diagnostics.hpp>

#include <chisel/solver.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace chisel {

namespace {

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

bool DiagnosticsRecord::finite() const {
  const double vals[] = {time,         mass,          energy,       norm_y_h,    norm_y_v,
                         norm_y_dual,  norm_ygamma_h, norm_ygamma_v, norm_w_v,   norm_xi_h,
                         norm_xigamma_h, norm_xi_inf, max_abs_y,    max_abs_ygamma,
                         inc_y_dual,   inc_y_h_scaled, inc_ygamma_h};
  for (double v : vals)
    if (!std::isfinite(v)) return false;
  return true;
}

std::string DiagnosticsTable::csv_header() {
  return "step,time,mass,energy,norm_y_h,norm_y_v,norm_y_dual,norm_ygamma_h,norm_ygamma_v,"
         "norm_w_v,norm_xi_h,norm_xigamma_h,norm_xi_inf,max_abs_y,max_abs_ygamma,"
         "newton_iterations,inc_y_dual,inc_y_h_scaled,inc_ygamma_h";
}

void DiagnosticsTable::write_csv(std::ostream& os) const {
  os << csv_header() << "\n";
  for (const auto& r : rows) {
    os << r.step << "," << fmt(r.time) << "," << fmt(r.mass) << "," << fmt(r.energy) << ","
       << fmt(r.norm_y_h) << "," << fmt(r.norm_y_v) << "," << fmt(r.norm_y_dual) << ","
       << fmt(r.norm_ygamma_h) << "," << fmt(r.norm_ygamma_v) << "," << fmt(r.norm_w_v) << ","
       << fmt(r.norm_xi_h) << "," << fmt(r.norm_xigamma_h) << "," << fmt(r.norm_xi_inf) << ","
       << fmt(r.max_abs_y) << "," << fmt(r.max_abs_ygamma) << "," << r.newton_iterations << ","
       << fmt(r.inc_y_dual) << "," << fmt(r.inc_y_h_scaled) << "," << fmt(r.inc_ygamma_h) << "\n";
  }
}

void DiagnosticsTable::write_csv(const std::string& path) const {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  write_csv(os);
}

double discrete_energy(const RunConfig& cfg, const State& s, double t) {
  const StripGrid& g = cfg.grid;
  double e = 0.5 * grad_inner(g, s.y, s.y) + 0.5 * grad_inner_gamma(g, s.y_gamma, s.y_gamma);

  BulkField lam = cfg.lambda.at(g, t);
  BoundaryField lam_g = cfg.lambda_gamma.at(g, t);
  BulkField gf = cfg.g_exact ? cfg.g_exact(g, t) : cfg.g.at(g, t);
  BoundaryField ggf = cfg.g_gamma_exact ? cfg.g_gamma_exact(g, t) : cfg.g_gamma.at(g, t);

  const bool nl = cfg.mode == SolveMode::Nonlinear;
  for (int j = 0; j < g.ny; ++j) {
    double mu = g.bulk_measure(j);
    double row = 0.0;
    for (int i = 0; i < g.nx; ++i) {
      double yv = s.y.at(i, j);
      double val;
      if (nl) {
        val = yosida_primitive(cfg.pair.bulk_graph, cfg.eps, yv) +
              lam.at(i, j) * cfg.pair.bulk_pi.primitive(yv);
      } else {
        val = 0.5 * lam.at(i, j) * yv * yv;
      }
      row += val - gf.at(i, j) * yv;
    }
    e += mu * row;
  }
  double srow = 0.0;
  for (int c = 0; c < 2; ++c) {
    for (int i = 0; i < g.nx; ++i) {
      double yv = s.y_gamma.at(c, i);
      double val;
      if (nl) {
        val = boundary_yosida_primitive(cfg.pair, cfg.eps, yv) +
              lam_g.at(c, i) * cfg.pair.boundary_pi.primitive(yv);
      } else {
        val = 0.5 * lam_g.at(c, i) * yv * yv;
      }
      srow += val - ggf.at(c, i) * yv;
    }
  }
  e += g.surface_measure() * srow;
  return e;
}

DiagnosticsRecord record(const State& state, const State* prev_state, const RunConfig& cfg,
                         int step, int newton_iterations) {
  const StripGrid& g = cfg.grid;
  DiagnosticsRecord r;
  r.step = step;
  r.time = state.time;
  r.mass = mean_value(g, state.y);
  r.energy = discrete_energy(cfg, state, state.time);
  r.norm_y_h = norm_h(g, state.y);
  r.norm_y_v = norm_v(g, state.y);
  r.norm_y_dual = cfg.full_diagnostics ? dual_norm(g, state.y) : 0.0;
  r.norm_ygamma_h = norm_h_gamma(g, state.y_gamma);
  r.norm_ygamma_v = norm_v_gamma(g, state.y_gamma);
  r.norm_w_v = norm_v(g, state.w);
  r.norm_xi_h = norm_h(g, state.xi);
  r.norm_xigamma_h = norm_h_gamma(g, state.xi_gamma);
  r.norm_xi_inf = norm_inf(state.xi);
  r.max_abs_y = norm_inf(state.y);
  r.max_abs_ygamma = norm_inf_gamma(state.y_gamma);
  r.newton_iterations = newton_iterations;
  if (prev_state != nullptr) {
    BulkField dy = axpy(-1.0, prev_state->y, state.y);
    BoundaryField dyg = axpy(-1.0, prev_state->y_gamma, state.y_gamma);
    r.inc_y_dual = cfg.full_diagnostics ? dual_norm(g, dy) : 0.0;
    r.inc_y_h_scaled = std::sqrt(tau_eps(cfg.tau, cfg.eps)) * norm_h(g, dy);
    r.inc_ygamma_h = norm_h_gamma(g, dyg);
  }
  return r;
}

namespace {

bool graphs_equal(const MonotoneGraph& a, const MonotoneGraph& b) {
  if (a.kind() != b.kind()) return false;
  if (a.domain().lo != b.domain().lo || a.domain().hi != b.domain().hi) return false;
  return a.odd_coeffs() == b.odd_coeffs();
}

bool pairs_equal(const PotentialPair& a, const PotentialPair& b) {
  return graphs_equal(a.bulk_graph, b.bulk_graph) &&
         graphs_equal(a.boundary_graph, b.boundary_graph) && a.eta == b.eta &&
         a.c_compat == b.c_compat && a.bulk_pi.kind() == b.bulk_pi.kind() &&
         a.bulk_pi.slope() == b.bulk_pi.slope() &&
         a.boundary_pi.kind() == b.boundary_pi.kind() &&
         a.boundary_pi.slope() == b.boundary_pi.slope();
}

bool per_step_snapshots(const RunResult& r) {
  if (r.snapshot_steps.size() != static_cast<size_t>(r.steps) + 1) return false;
  for (size_t k = 0; k < r.snapshot_steps.size(); ++k)
    if (r.snapshot_steps[k] != static_cast<int>(k)) return false;
  return true;
}

}  // namespace

DependenceReport dependence_report(const RunConfig& cfg1, const RunResult& run1,
                                   const RunConfig& cfg2, const RunResult& run2) {
  const StripGrid& g = cfg1.grid;
  if (cfg1.grid.nx != cfg2.grid.nx || cfg1.grid.ny != cfg2.grid.ny ||
      cfg1.grid.lx != cfg2.grid.lx || cfg1.grid.ly != cfg2.grid.ly)
    throw ConfigMismatchError("dependence_report: grids differ");
  if (cfg1.dt != cfg2.dt || cfg1.t_final != cfg2.t_final)
    throw ConfigMismatchError("dependence_report: time discretizations differ");
  if (cfg1.eps != cfg2.eps || cfg1.tau != cfg2.tau)
    throw ConfigMismatchError("dependence_report: eps/tau differ");
  if (cfg1.mode != cfg2.mode) throw ConfigMismatchError("dependence_report: modes differ");
  if (!pairs_equal(cfg1.pair, cfg2.pair))
    throw ConfigMismatchError("dependence_report: potential pairs differ");
  if (!per_step_snapshots(run1) || !per_step_snapshots(run2))
    throw ConfigMismatchError("dependence_report: per-step trajectories required");
  if (run1.steps != run2.steps) throw ConfigMismatchError("dependence_report: step counts differ");

  double m1 = mean_value(g, run1.snapshots.front().y);
  double m2 = mean_value(g, run2.snapshots.front().y);
  if (std::fabs(m1 - m2) > 1e-12)
    throw ConfigMismatchError("dependence_report: initial data have different mean values");

  DependenceReport rep;
  const double dt = run1.dt_effective;
  const double tau = cfg1.tau;
  for (size_t n = 0; n < run1.snapshots.size(); ++n) {
    const State& a = run1.snapshots[n];
    const State& b = run2.snapshots[n];
    BulkField dy = axpy(-1.0, b.y, a.y);
    BoundaryField dyg = axpy(-1.0, b.y_gamma, a.y_gamma);
    double dn = dual_norm(g, dy);
    double hn = norm_h(g, dy);
    double hgn = norm_h_gamma(g, dyg);
    rep.sup_dual_sq = std::max(rep.sup_dual_sq, dn * dn);
    rep.sup_h_sq_scaled = std::max(rep.sup_h_sq_scaled, tau * hn * hn);
    rep.sup_hgamma_sq = std::max(rep.sup_hgamma_sq, hgn * hgn);
    if (n > 0) {
      rep.int_grad_sq += dt * grad_inner(g, dy, dy);
      rep.int_gradgamma_sq += dt * grad_inner_gamma(g, dyg, dyg);
    }
  }
  rep.lhs = rep.sup_dual_sq + rep.sup_h_sq_scaled + rep.sup_hgamma_sq + rep.int_grad_sq +
            rep.int_gradgamma_sq;

  {
    const State& a0 = run1.snapshots.front();
    const State& b0 = run2.snapshots.front();
    BulkField dy0 = axpy(-1.0, b0.y, a0.y);
    BoundaryField dyg0 = axpy(-1.0, b0.y_gamma, a0.y_gamma);
    double dn = dual_norm(g, dy0);
    double hn = norm_h(g, dy0);
    double hgn = norm_h_gamma(g, dyg0);
    rep.init_dual_sq = dn * dn;
    rep.init_h_sq_scaled = tau * hn * hn;
    rep.init_hgamma_sq = hgn * hgn;
  }
  for (size_t n = 1; n < run1.snapshots.size(); ++n) {
    double t = run1.snapshots[n].time;
    BulkField dg = axpy(-1.0, cfg2.g_exact ? cfg2.g_exact(g, t) : cfg2.g.at(g, t),
                        cfg1.g_exact ? cfg1.g_exact(g, t) : cfg1.g.at(g, t));
    BoundaryField dgg =
        axpy(-1.0, cfg2.g_gamma_exact ? cfg2.g_gamma_exact(g, t) : cfg2.g_gamma.at(g, t),
             cfg1.g_gamma_exact ? cfg1.g_gamma_exact(g, t) : cfg1.g_gamma.at(g, t));
    double gn = norm_h(g, dg);
    double ggn = norm_h_gamma(g, dgg);
    rep.int_g_sq += dt * gn * gn;
    rep.int_ggamma_sq += dt * ggn * ggn;
  }
  rep.rhs_data = rep.init_dual_sq + rep.init_h_sq_scaled + rep.init_hgamma_sq + rep.int_g_sq +
                 rep.int_ggamma_sq;
  rep.ratio = rep.rhs_data > 0.0 ? rep.lhs / rep.rhs_data : 0.0;
  return rep;
}

std::string DependenceReport::to_json() const {
  std::ostringstream os;
  os << "{\n"
     << "  \"lhs\": " << fmt(lhs) << ",\n"
     << "  \"rhs_data\": " << fmt(rhs_data) << ",\n"
     << "  \"ratio\": " << fmt(ratio) << ",\n"
     << "  \"sup_dual_sq\": " << fmt(sup_dual_sq) << ",\n"
     << "  \"sup_h_sq_scaled\": " << fmt(sup_h_sq_scaled) << ",\n"
     << "  \"sup_hgamma_sq\": " << fmt(sup_hgamma_sq) << ",\n"
     << "  \"int_grad_sq\": " << fmt(int_grad_sq) << ",\n"
     << "  \"int_gradgamma_sq\": " << fmt(int_gradgamma_sq) << ",\n"
     << "  \"init_dual_sq\": " << fmt(init_dual_sq) << ",\n"
     << "  \"init_h_sq_scaled\": " << fmt(init_h_sq_scaled) << ",\n"
     << "  \"init_hgamma_sq\": " << fmt(init_hgamma_sq) << ",\n"
     << "  \"int_g_sq\": " << fmt(int_g_sq) << ",\n"
     << "  \"int_ggamma_sq\": " << fmt(int_ggamma_sq) << "\n"
     << "}\n";
  return os.str();
}

SeparationReport separation_report(const DiagnosticsTable& table, const MonotoneGraph& bulk_graph) {
  if (bulk_graph.kind() != MonotoneGraph::Kind::Logarithmic)
    throw DomainKindMismatchError(
        "separation_report: requires a graph with an open bounded interval domain (logarithmic); "
        "got " +
        bulk_graph.kind_name());
  double maxabs = 0.0;
  for (const auto& r : table.rows) maxabs = std::max({maxabs, r.max_abs_y, r.max_abs_ygamma});
  SeparationReport rep;
  rep.delta = bulk_graph.domain().hi - maxabs;  // symmetric domain (-1,1)
  rep.ok = rep.delta > 0.0;
  return rep;
}

}  // namespace chisel
