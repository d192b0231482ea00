#pragma once

#include <chisel/diagnostics.hpp>
#include <chisel/errors.hpp>
#include <chisel/grid.hpp>
#include <chisel/potential.hpp>

#include <functional>
#include <vector>

namespace chisel {

enum class SolveMode { Nonlinear, Linearized };
enum class NewtonGuess { Previous, Mean };

struct NewtonOptions {
  int max_iter = 30;
  double tol = 1e-10;
  NewtonGuess initial_guess = NewtonGuess::Previous;
};

/// Named spatial profile: constant, cosine mode in x, linear in y, or a
/// separable cosine in x and y (used for initial data and manufactured runs).
struct FieldProfile {
  enum class Kind { Constant, Fourier, YLinear, FourierXY };
  Kind kind = Kind::Constant;
  double value = 0.0;      // Constant
  double amplitude = 0.0;  // Fourier / FourierXY
  int mode = 1;
  double offset = 0.0;     // YLinear
  double slope = 0.0;

  static FieldProfile constant(double v);
  static FieldProfile fourier(double amplitude, int mode = 1);
  static FieldProfile ylinear(double offset, double slope);
  static FieldProfile fourier_xy(double amplitude, int mode = 1);

  double eval(const StripGrid& g, int i, int j) const;
  double eval_boundary(const StripGrid& g, int comp, int i) const;
};

/// Coefficient or source of the form sum(base) + t * sum(rate).
struct TimeAffineBulk {
  std::vector<FieldProfile> base;
  std::vector<FieldProfile> rate;
  BulkField at(const StripGrid& g, double t) const;
  bool time_constant() const { return rate.empty(); }
};

struct TimeAffineBoundary {
  std::vector<FieldProfile> base;
  std::vector<FieldProfile> rate;
  BoundaryField at(const StripGrid& g, double t) const;
  bool time_constant() const { return rate.empty(); }
};

/// One time level: order parameter, trace, chemical potential, and the
/// selections of the two regularized graphs.
struct State {
  BulkField y;
  BoundaryField y_gamma;
  BulkField w;
  BulkField xi;
  BoundaryField xi_gamma;
  double time = 0.0;
};

struct RunConfig {
  double tau = 1.0;
  double eps = 0.1;
  double dt = 1e-3;
  double t_final = 0.1;
  SolveMode mode = SolveMode::Nonlinear;
  StripGrid grid;
  PotentialPair pair;
  TimeAffineBulk lambda;
  TimeAffineBulk g;
  TimeAffineBoundary lambda_gamma;
  TimeAffineBoundary g_gamma;
  std::vector<FieldProfile> y0;  // summed profiles
  NewtonOptions newton;

  // Skips the dual-norm diagnostics (two inner CG solves per step); used by
  // study harnesses whose metrics do not involve the dual norm.
  bool full_diagnostics = true;

  // Optional exact-source hooks (convergence harness); when set they replace
  // the affine forms above.
  std::function<BulkField(const StripGrid&, double)> g_exact;
  std::function<BoundaryField(const StripGrid&, double)> g_gamma_exact;
};

struct StepStats {
  int newton_iterations = 0;
  std::vector<double> residual_history;  // sup-norm per Newton iterate, initial included
};

struct RunResult {
  std::vector<State> snapshots;
  std::vector<int> snapshot_steps;
  DiagnosticsTable diagnostics;
  double dt_effective = 0.0;
  int steps = 0;
};

struct EpsDistance {
  double eps_coarse = 0.0;
  double eps_fine = 0.0;
  double dist_linf_h = 0.0;
  double dist_l2_v = 0.0;
  double dist_linf_dual = 0.0;
};

struct EpsStudyResult {
  std::vector<double> eps_list;
  std::vector<RunResult> runs;
  std::vector<EpsDistance> distances;
};

// Viscosity parameter actually used by the scheme: tau when positive, eps
// in the pure case.
double tau_eps(double tau, double eps);

// Structural and data validation; an empty list means the config is admissible.
std::vector<ValidationError> validate_config(const RunConfig& cfg);

// Initial quintuple: y from the profile, trace copied, w and xi from one
// evaluation of the chemical-potential relation with the rate terms dropped.
State initial_state(const RunConfig& cfg);

// One implicit step to time t_next (the step size is t_next - state.time).
// Throws NewtonDivergenceError when the residual is not brought under
// newton.tol within newton.max_iter iterations.
State step(const State& state, const RunConfig& cfg, double t_next, StepStats* stats = nullptr,
           int step_index = -1);

// Fixed-step advance to t_final with per-step diagnostics and snapshots every
// save_every steps (first and last always kept). dt is adjusted to divide
// t_final exactly.
RunResult run(const RunConfig& cfg, int save_every = 1);

// Identical configs varying only eps (boundary level eta*eps follows);
// pairwise trajectory distances for consecutive eps values.
EpsStudyResult eps_continuation(const RunConfig& cfg, const std::vector<double>& eps_list);

// --- verification surfaces -----------------------------------------------------

// Unknown vector layout: per row j, [y(i=0..nx-1), w(i=0..nx-1)].
std::vector<double> pack_state(const RunConfig& cfg, const BulkField& y, const BulkField& w);
void unpack_state(const RunConfig& cfg, const std::vector<double>& u, BulkField& y, BulkField& w);

// Residual of the implicit system at unknown u given the previous state.
std::vector<double> newton_residual(const RunConfig& cfg, const State& prev,
                                    const std::vector<double>& u, double t_next);

// Dense Jacobian of newton_residual (row-major), for small grids.
std::vector<double> newton_jacobian_dense(const RunConfig& cfg, const State& prev,
                                          const std::vector<double>& u, double t_next);

}  // namespace chisel
