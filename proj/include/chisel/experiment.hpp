#pragma once

#include <chisel/config.hpp>

#include <string>
#include <utility>
#include <vector>

namespace chisel {

struct ExperimentSpec {
  std::string command;  // run | eps-study | perturb-study | convergence | check-potentials
  std::string config_path;  // empty: all defaults
  std::string out_dir;
  int save_every = 1;
  int workers = 1;
  std::vector<std::pair<std::string, std::string>> overrides;  // dotted key, raw value
};

// Exit codes: 0 ok, 2 config error, 3 solver divergence, 4 invariant violation.
int run_experiment(const ExperimentSpec& spec);

// --- convergence study pieces (exposed for the acceptance suite) ---------------

struct ConvergenceCase {
  std::string study;  // "time" or "space"
  int nx = 0, ny = 0;
  double dt = 0.0;
  int steps = 0;
  double err_linf_h = 0.0;      // against the manufactured solution
  double diff_to_finer = -1.0;  // same-grid distance to the next finer dt (time study)
};

struct ConvergenceResult {
  std::vector<ConvergenceCase> cases;
  double temporal_order = 0.0;         // from successive same-grid differences
  std::vector<double> spatial_orders;  // from errors against the exact solution
};

// Linearized manufactured-solution study: y = cos(2 pi x / lx) cos(pi y / ly) e^{-t}.
ConvergenceResult convergence_study(const RunConfig& base, const ConvergenceSpec& spec);

// Builds the linearized manufactured-solution config on a given grid.
RunConfig manufactured_config(const RunConfig& base, const ConvergenceSpec& spec, int nx, int ny,
                              double dt);

// Max over steps of ||y_h - y_exact||_H for a manufactured run.
double manufactured_error(const RunConfig& cfg, const RunResult& result);

}  // namespace chisel
