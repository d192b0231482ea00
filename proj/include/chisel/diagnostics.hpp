#pragma once

#include <chisel/grid.hpp>
#include <chisel/potential.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace chisel {

struct RunConfig;
struct RunResult;
struct State;

/// Per-step monitored quantities: the norms the a priori estimates bound.
struct DiagnosticsRecord {
  int step = 0;
  double time = 0.0;
  double mass = 0.0;
  double energy = 0.0;
  double norm_y_h = 0.0;
  double norm_y_v = 0.0;
  double norm_y_dual = 0.0;
  double norm_ygamma_h = 0.0;
  double norm_ygamma_v = 0.0;
  double norm_w_v = 0.0;
  double norm_xi_h = 0.0;
  double norm_xigamma_h = 0.0;
  double norm_xi_inf = 0.0;
  double max_abs_y = 0.0;
  double max_abs_ygamma = 0.0;
  int newton_iterations = 0;
  double inc_y_dual = 0.0;      // ||y^n - y^{n-1}||_*
  double inc_y_h_scaled = 0.0;  // tau_eps^{1/2} ||y^n - y^{n-1}||_H
  double inc_ygamma_h = 0.0;    // ||y_G^n - y_G^{n-1}||_{H_Gamma}

  bool finite() const;
};

struct DiagnosticsTable {
  std::vector<DiagnosticsRecord> rows;

  static std::string csv_header();
  void write_csv(std::ostream& os) const;
  void write_csv(const std::string& path) const;
};

/// Discrete counterparts of the two sides of the continuous-dependence
/// inequality for a run pair.
struct DependenceReport {
  double lhs = 0.0;
  double rhs_data = 0.0;
  double ratio = 0.0;
  // lhs pieces
  double sup_dual_sq = 0.0;
  double sup_h_sq_scaled = 0.0;  // tau * sup ||dy||_H^2
  double sup_hgamma_sq = 0.0;
  double int_grad_sq = 0.0;
  double int_gradgamma_sq = 0.0;
  // rhs pieces
  double init_dual_sq = 0.0;
  double init_h_sq_scaled = 0.0;
  double init_hgamma_sq = 0.0;
  double int_g_sq = 0.0;
  double int_ggamma_sq = 0.0;

  std::string to_json() const;
};

struct SeparationReport {
  double delta = 0.0;
  bool ok = false;
};

/// Energy of a state: Dirichlet halves plus the regularized convex primitives,
/// the perturbation primitives, and the source couplings, bulk and boundary.
double discrete_energy(const RunConfig& cfg, const State& s, double t);

DiagnosticsRecord record(const State& state, const State* prev_state, const RunConfig& cfg,
                         int step, int newton_iterations);

/// Requires both runs to share grid, dt, eps, tau, mode and potentials, to
/// carry per-step snapshots, and to start from equal means (to 1e-12).
DependenceReport dependence_report(const RunConfig& cfg1, const RunResult& run1,
                                   const RunConfig& cfg2, const RunResult& run2);

/// Distance of the trajectory range from the endpoints of the open graph
/// domain; only graphs with an open bounded interval domain are admissible.
SeparationReport separation_report(const DiagnosticsTable& table, const MonotoneGraph& bulk_graph);

}  // namespace chisel
