#include <chisel/solver.hpp>

#include <chisel/linalg.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace chisel {

// --- profiles -------------------------------------------------------------------

FieldProfile FieldProfile::constant(double v) {
  FieldProfile p;
  p.kind = Kind::Constant;
  p.value = v;
  return p;
}

FieldProfile FieldProfile::fourier(double amplitude, int mode) {
  FieldProfile p;
  p.kind = Kind::Fourier;
  p.amplitude = amplitude;
  p.mode = mode;
  return p;
}

FieldProfile FieldProfile::ylinear(double offset, double slope) {
  FieldProfile p;
  p.kind = Kind::YLinear;
  p.offset = offset;
  p.slope = slope;
  return p;
}

FieldProfile FieldProfile::fourier_xy(double amplitude, int mode) {
  FieldProfile p;
  p.kind = Kind::FourierXY;
  p.amplitude = amplitude;
  p.mode = mode;
  return p;
}

double FieldProfile::eval(const StripGrid& g, int i, int j) const {
  switch (kind) {
    case Kind::Constant:
      return value;
    case Kind::Fourier:
      return amplitude * std::cos(2.0 * std::numbers::pi * mode * (i * g.hx) / g.lx);
    case Kind::YLinear:
      return offset + slope * (j * g.hy);
    case Kind::FourierXY:
      return amplitude * std::cos(2.0 * std::numbers::pi * mode * (i * g.hx) / g.lx) *
             std::cos(std::numbers::pi * (j * g.hy) / g.ly);
  }
  return 0.0;
}

double FieldProfile::eval_boundary(const StripGrid& g, int comp, int i) const {
  return eval(g, i, comp == 0 ? 0 : g.ny - 1);
}

BulkField TimeAffineBulk::at(const StripGrid& g, double t) const {
  BulkField f(g.nx, g.ny, 0.0);
  for (const auto& p : base)
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) f.at(i, j) += p.eval(g, i, j);
  for (const auto& p : rate)
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) f.at(i, j) += t * p.eval(g, i, j);
  return f;
}

BoundaryField TimeAffineBoundary::at(const StripGrid& g, double t) const {
  BoundaryField f(g.nx, 0.0);
  for (const auto& p : base)
    for (int c = 0; c < 2; ++c)
      for (int i = 0; i < g.nx; ++i) f.at(c, i) += p.eval_boundary(g, c, i);
  for (const auto& p : rate)
    for (int c = 0; c < 2; ++c)
      for (int i = 0; i < g.nx; ++i) f.at(c, i) += t * p.eval_boundary(g, c, i);
  return f;
}

// --- scheme ----------------------------------------------------------------------

double tau_eps(double tau, double eps) { return tau > 0.0 ? tau : eps; }

namespace {

// Per-step frozen data: sources and coefficients at t_next, explicit
// perturbation parts at the previous iterate.
struct StepData {
  double dt = 0.0;
  double te = 0.0;      // tau_eps
  double gamma = 0.0;   // surface-to-bulk measure ratio on boundary rows, 2/hy
  BulkField lam;        // lambda(t_next), linearized reaction coefficient
  BoundaryField lam_g;  // lambda_Gamma(t_next)
  BulkField pexp;       // lambda*pi(y_old) - g  (nonlinear) or -g (linearized)
  BoundaryField pexp_g;
};

StepData make_step_data(const RunConfig& cfg, const State& prev, double t_next) {
  const StripGrid& g = cfg.grid;
  StepData d;
  d.dt = t_next - prev.time;
  if (!(d.dt > 0.0)) throw std::invalid_argument("step: t_next must exceed state.time");
  d.te = tau_eps(cfg.tau, cfg.eps);
  d.gamma = 2.0 / g.hy;
  d.lam = cfg.lambda.at(g, t_next);
  d.lam_g = cfg.lambda_gamma.at(g, t_next);
  BulkField gf = cfg.g_exact ? cfg.g_exact(g, t_next) : cfg.g.at(g, t_next);
  BoundaryField ggf = cfg.g_gamma_exact ? cfg.g_gamma_exact(g, t_next) : cfg.g_gamma.at(g, t_next);

  d.pexp = BulkField(g.nx, g.ny, 0.0);
  d.pexp_g = BoundaryField(g.nx, 0.0);
  if (cfg.mode == SolveMode::Nonlinear) {
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i)
        d.pexp.at(i, j) = d.lam.at(i, j) * cfg.pair.bulk_pi.value(prev.y.at(i, j)) - gf.at(i, j);
    for (int c = 0; c < 2; ++c)
      for (int i = 0; i < g.nx; ++i)
        d.pexp_g.at(c, i) =
            d.lam_g.at(c, i) * cfg.pair.boundary_pi.value(prev.y_gamma.at(c, i)) - ggf.at(c, i);
  } else {
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) d.pexp.at(i, j) = -gf.at(i, j);
    for (int c = 0; c < 2; ++c)
      for (int i = 0; i < g.nx; ++i) d.pexp_g.at(c, i) = -ggf.at(c, i);
  }
  return d;
}

double bulk_nonlinearity(const RunConfig& cfg, const StepData& d, int i, int j, double yv) {
  if (cfg.mode == SolveMode::Nonlinear) return yosida(cfg.pair.bulk_graph, cfg.eps, yv);
  return d.lam.at(i, j) * yv;
}

double bulk_nonlinearity_prime(const RunConfig& cfg, const StepData& d, int i, int j, double yv) {
  if (cfg.mode == SolveMode::Nonlinear) return yosida_prime(cfg.pair.bulk_graph, cfg.eps, yv);
  return d.lam.at(i, j);
}

double bnd_nonlinearity(const RunConfig& cfg, const StepData& d, int c, int i, double yv) {
  if (cfg.mode == SolveMode::Nonlinear) return boundary_yosida(cfg.pair, cfg.eps, yv);
  return d.lam_g.at(c, i) * yv;
}

double bnd_nonlinearity_prime(const RunConfig& cfg, const StepData& d, int c, int i, double yv) {
  if (cfg.mode == SolveMode::Nonlinear) return boundary_yosida_prime(cfg.pair, cfg.eps, yv);
  return d.lam_g.at(c, i);
}

void residual_impl(const RunConfig& cfg, const StepData& d, const State& prev,
                   const std::vector<double>& u, std::vector<double>& out) {
  const StripGrid& g = cfg.grid;
  const int nx = g.nx, ny = g.ny;
  const double ihx2 = 1.0 / (g.hx * g.hx);
  const double ihy2 = 1.0 / (g.hy * g.hy);
  out.assign(u.size(), 0.0);

  auto yv = [&](int i, int j) { return u[static_cast<size_t>(j) * 2 * nx + i]; };
  auto wv = [&](int i, int j) { return u[static_cast<size_t>(j) * 2 * nx + nx + i]; };

  for (int j = 0; j < ny; ++j) {
    const bool bottom = (j == 0), top = (j == ny - 1);
    const int c = bottom ? 0 : 1;
    for (int i = 0; i < nx; ++i) {
      const int il = g.left(i), ir = g.right(i);
      double lap_w = (wv(ir, j) + wv(il, j) - 2.0 * wv(i, j)) * ihx2;
      double lap_y = (yv(ir, j) + yv(il, j) - 2.0 * yv(i, j)) * ihx2;
      if (bottom) {
        lap_w += 2.0 * (wv(i, 1) - wv(i, 0)) * ihy2;
        lap_y += 2.0 * (yv(i, 1) - yv(i, 0)) * ihy2;
      } else if (top) {
        lap_w += 2.0 * (wv(i, ny - 2) - wv(i, ny - 1)) * ihy2;
        lap_y += 2.0 * (yv(i, ny - 2) - yv(i, ny - 1)) * ihy2;
      } else {
        lap_w += (wv(i, j + 1) + wv(i, j - 1) - 2.0 * wv(i, j)) * ihy2;
        lap_y += (yv(i, j + 1) + yv(i, j - 1) - 2.0 * yv(i, j)) * ihy2;
      }
      const double dy_dt = (yv(i, j) - prev.y.at(i, j)) / d.dt;

      double r1 = dy_dt - lap_w;
      double r2 = -wv(i, j) + d.te * dy_dt - lap_y + bulk_nonlinearity(cfg, d, i, j, yv(i, j)) +
                  d.pexp.at(i, j);
      if (bottom || top) {
        double lap_g = (yv(ir, j) + yv(il, j) - 2.0 * yv(i, j)) * ihx2;
        double rg = dy_dt - lap_g + bnd_nonlinearity(cfg, d, c, i, yv(i, j)) + d.pexp_g.at(c, i);
        // balanced row scaling keeps the sup-norm tolerance meaningful across
        // resolutions (gamma grows like 1/hy)
        r2 = (r2 + d.gamma * rg) / (1.0 + d.gamma);
      }
      out[static_cast<size_t>(j) * 2 * nx + i] = r1;
      out[static_cast<size_t>(j) * 2 * nx + nx + i] = r2;
    }
  }
}

// Jacobian in block-tridiagonal form; blocks indexed by grid row.
void assemble_blocks(const RunConfig& cfg, const StepData& d, const std::vector<double>& u,
                     std::vector<std::vector<double>>& B, std::vector<std::vector<double>>& C,
                     std::vector<std::vector<double>>& D) {
  const StripGrid& g = cfg.grid;
  const int nx = g.nx, ny = g.ny;
  const int m = 2 * nx;
  const double ihx2 = 1.0 / (g.hx * g.hx);
  const double ihy2 = 1.0 / (g.hy * g.hy);

  B.assign(ny, std::vector<double>(static_cast<size_t>(m) * m, 0.0));
  C.assign(ny, std::vector<double>(static_cast<size_t>(m) * m, 0.0));
  D.assign(ny, std::vector<double>(static_cast<size_t>(m) * m, 0.0));

  auto yv = [&](int i, int j) { return u[static_cast<size_t>(j) * 2 * nx + i]; };

  for (int j = 0; j < ny; ++j) {
    const bool bottom = (j == 0), top = (j == ny - 1);
    const int c = bottom ? 0 : 1;
    const double cm = bottom ? 0.0 : (top ? 2.0 * ihy2 : ihy2);  // coupling to j-1
    const double cp = top ? 0.0 : (bottom ? 2.0 * ihy2 : ihy2);  // coupling to j+1
    auto& Bj = B[j];
    auto& Cj = C[j];
    auto& Dj = D[j];
    for (int i = 0; i < nx; ++i) {
      const int il = g.left(i), ir = g.right(i);
      const int r1 = i, r2 = nx + i;
      // R1 row: y diag, -L_h acting on w
      Bj[static_cast<size_t>(r1) * m + i] = 1.0 / d.dt;
      Bj[static_cast<size_t>(r1) * m + nx + i] = 2.0 * ihx2 + 2.0 * ihy2;
      Bj[static_cast<size_t>(r1) * m + nx + il] -= ihx2;
      Bj[static_cast<size_t>(r1) * m + nx + ir] -= ihx2;
      if (cm != 0.0) Cj[static_cast<size_t>(r1) * m + nx + i] = -cm;
      if (cp != 0.0) Dj[static_cast<size_t>(r1) * m + nx + i] = -cp;

      // R2 row: w diag, -L_h acting on y plus diagonal nonlinearity; boundary
      // rows carry the same 1/(1+gamma) scaling as the residual
      double rs = (bottom || top) ? 1.0 / (1.0 + d.gamma) : 1.0;
      Bj[static_cast<size_t>(r2) * m + nx + i] = -rs;
      double diag = d.te / d.dt + 2.0 * ihx2 + 2.0 * ihy2 +
                    bulk_nonlinearity_prime(cfg, d, i, j, yv(i, j));
      double xnb = -ihx2;
      if (bottom || top) {
        diag += d.gamma * (1.0 / d.dt + 2.0 * ihx2 +
                           bnd_nonlinearity_prime(cfg, d, c, i, yv(i, j)));
        xnb -= d.gamma * ihx2;
      }
      Bj[static_cast<size_t>(r2) * m + i] += rs * diag;
      Bj[static_cast<size_t>(r2) * m + il] += rs * xnb;
      Bj[static_cast<size_t>(r2) * m + ir] += rs * xnb;
      if (cm != 0.0) Cj[static_cast<size_t>(r2) * m + i] = -rs * cm;
      if (cp != 0.0) Dj[static_cast<size_t>(r2) * m + i] = -rs * cp;
    }
  }
}

double sup_norm(const std::vector<double>& r) {
  double m = 0.0;
  for (double x : r) m = std::max(m, std::fabs(x));
  return m;
}

struct StepperCache {
  BlockTridiagonalLU lu;
  bool valid = false;
  double dt = 0.0;
};

State finish_state(const RunConfig& cfg, const std::vector<double>& u, double t_next) {
  const StripGrid& g = cfg.grid;
  State s;
  s.time = t_next;
  s.y = BulkField(g.nx, g.ny);
  s.w = BulkField(g.nx, g.ny);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      s.y.at(i, j) = u[static_cast<size_t>(j) * 2 * g.nx + i];
      s.w.at(i, j) = u[static_cast<size_t>(j) * 2 * g.nx + g.nx + i];
    }
  }
  s.y_gamma = trace(g, s.y);
  s.xi = BulkField(g.nx, g.ny, 0.0);
  s.xi_gamma = BoundaryField(g.nx, 0.0);
  if (cfg.mode == SolveMode::Nonlinear) {
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) s.xi.at(i, j) = yosida(cfg.pair.bulk_graph, cfg.eps, s.y.at(i, j));
    for (int c = 0; c < 2; ++c)
      for (int i = 0; i < g.nx; ++i)
        s.xi_gamma.at(c, i) = boundary_yosida(cfg.pair, cfg.eps, s.y_gamma.at(c, i));
  }
  return s;
}

State advance_step(const RunConfig& cfg, const State& prev, double t_next, StepStats* stats,
                   int step_index, StepperCache* cache) {
  const StripGrid& g = cfg.grid;
  StepData d = make_step_data(cfg, prev, t_next);

  std::vector<double> u;
  if (cfg.newton.initial_guess == NewtonGuess::Previous) {
    u = pack_state(cfg, prev.y, prev.w);
  } else {
    double m = mean_value(g, prev.y);
    BulkField ym(g.nx, g.ny, m);
    BulkField w0(g.nx, g.ny, 0.0);
    u = pack_state(cfg, ym, w0);
  }

  // Jacobian is state-independent in linearized mode with time-constant
  // coefficients: reusable factorization across steps.
  const bool reusable = cfg.mode == SolveMode::Linearized && cfg.lambda.time_constant() &&
                        cfg.lambda_gamma.time_constant();

  std::vector<double> r, delta;
  std::vector<std::vector<double>> B, C, D;
  BlockTridiagonalLU local_lu;
  int it = 0;
  while (true) {
    residual_impl(cfg, d, prev, u, r);
    double rn = sup_norm(r);
    if (stats) stats->residual_history.push_back(rn);
    if (rn <= cfg.newton.tol) break;
    if (it >= cfg.newton.max_iter)
      throw NewtonDivergenceError(
          "Newton did not reach tol=" + std::to_string(cfg.newton.tol) + " within " +
              std::to_string(cfg.newton.max_iter) + " iterations (residual " + std::to_string(rn) +
              "); reduce dt",
          step_index);

    BlockTridiagonalLU* lu = nullptr;
    if (reusable && cache) {
      // step sizes agree up to rounding of t_final*k/n; a Jacobian with a
      // 1e-9-relative dt mismatch still converges (the residual gate is exact)
      if (!cache->valid || std::fabs(cache->dt - d.dt) > 1e-9 * d.dt) {
        assemble_blocks(cfg, d, u, B, C, D);
        if (!cache->lu.factor(B, C, D, 2 * g.nx))
          throw NewtonDivergenceError("singular Jacobian", step_index);
        cache->valid = true;
        cache->dt = d.dt;
      }
      lu = &cache->lu;
    } else {
      assemble_blocks(cfg, d, u, B, C, D);
      if (!local_lu.factor(B, C, D, 2 * g.nx))
        throw NewtonDivergenceError("singular Jacobian", step_index);
      lu = &local_lu;
    }

    delta = r;
    for (double& x : delta) x = -x;
    lu->solve(delta);
    for (size_t n = 0; n < u.size(); ++n) u[n] += delta[n];
    ++it;
  }
  if (stats) stats->newton_iterations = it;
  return finish_state(cfg, u, t_next);
}

}  // namespace

std::vector<double> pack_state(const RunConfig& cfg, const BulkField& y, const BulkField& w) {
  const StripGrid& g = cfg.grid;
  std::vector<double> u(static_cast<size_t>(2) * g.nx * g.ny);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      u[static_cast<size_t>(j) * 2 * g.nx + i] = y.at(i, j);
      u[static_cast<size_t>(j) * 2 * g.nx + g.nx + i] = w.at(i, j);
    }
  }
  return u;
}

void unpack_state(const RunConfig& cfg, const std::vector<double>& u, BulkField& y, BulkField& w) {
  const StripGrid& g = cfg.grid;
  y = BulkField(g.nx, g.ny);
  w = BulkField(g.nx, g.ny);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      y.at(i, j) = u[static_cast<size_t>(j) * 2 * g.nx + i];
      w.at(i, j) = u[static_cast<size_t>(j) * 2 * g.nx + g.nx + i];
    }
  }
}

std::vector<double> newton_residual(const RunConfig& cfg, const State& prev,
                                    const std::vector<double>& u, double t_next) {
  StepData d = make_step_data(cfg, prev, t_next);
  std::vector<double> out;
  residual_impl(cfg, d, prev, u, out);
  return out;
}

std::vector<double> newton_jacobian_dense(const RunConfig& cfg, const State& prev,
                                          const std::vector<double>& u, double t_next) {
  StepData d = make_step_data(cfg, prev, t_next);
  std::vector<std::vector<double>> B, C, D;
  assemble_blocks(cfg, d, u, B, C, D);
  const int nx = cfg.grid.nx, ny = cfg.grid.ny;
  const int m = 2 * nx;
  const size_t n = static_cast<size_t>(m) * ny;
  std::vector<double> J(n * n, 0.0);
  auto put = [&](int jb, int jcol_block, const std::vector<double>& blk) {
    for (int r = 0; r < m; ++r)
      for (int col = 0; col < m; ++col)
        J[(static_cast<size_t>(jb) * m + r) * n + static_cast<size_t>(jcol_block) * m + col] +=
            blk[static_cast<size_t>(r) * m + col];
  };
  for (int j = 0; j < ny; ++j) {
    put(j, j, B[j]);
    if (j > 0) put(j, j - 1, C[j]);
    if (j + 1 < ny) put(j, j + 1, D[j]);
  }
  return J;
}

State initial_state(const RunConfig& cfg) {
  const StripGrid& g = cfg.grid;
  State s;
  s.time = 0.0;
  s.y = BulkField(g.nx, g.ny);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      double v = 0.0;
      for (const auto& p : cfg.y0) v += p.eval(g, i, j);
      s.y.at(i, j) = v;
    }
  s.y_gamma = trace(g, s.y);

  // One evaluation of the chemical-potential relation with the time
  // increments dropped.
  BulkField lam0 = cfg.lambda.at(g, 0.0);
  BoundaryField lamg0 = cfg.lambda_gamma.at(g, 0.0);
  BulkField g0 = cfg.g_exact ? cfg.g_exact(g, 0.0) : cfg.g.at(g, 0.0);
  BoundaryField gg0 = cfg.g_gamma_exact ? cfg.g_gamma_exact(g, 0.0) : cfg.g_gamma.at(g, 0.0);
  BulkField lap = bulk_laplacian(g, s.y);
  BoundaryField lap_g = laplace_beltrami(g, s.y_gamma);
  const double gamma = 2.0 / g.hy;

  s.w = BulkField(g.nx, g.ny, 0.0);
  s.xi = BulkField(g.nx, g.ny, 0.0);
  s.xi_gamma = BoundaryField(g.nx, 0.0);
  const bool nl = cfg.mode == SolveMode::Nonlinear;
  if (nl) {
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) s.xi.at(i, j) = yosida(cfg.pair.bulk_graph, cfg.eps, s.y.at(i, j));
    for (int c = 0; c < 2; ++c)
      for (int i = 0; i < g.nx; ++i)
        s.xi_gamma.at(c, i) = boundary_yosida(cfg.pair, cfg.eps, s.y_gamma.at(c, i));
  }
  for (int j = 0; j < g.ny; ++j) {
    const bool bnd = (j == 0 || j == g.ny - 1);
    const int c = (j == 0) ? 0 : 1;
    for (int i = 0; i < g.nx; ++i) {
      double react = nl ? s.xi.at(i, j) + lam0.at(i, j) * cfg.pair.bulk_pi.value(s.y.at(i, j))
                        : lam0.at(i, j) * s.y.at(i, j);
      double w = -lap.at(i, j) + react - g0.at(i, j);
      if (bnd) {
        double react_g = nl ? s.xi_gamma.at(c, i) +
                                  lamg0.at(c, i) * cfg.pair.boundary_pi.value(s.y_gamma.at(c, i))
                            : lamg0.at(c, i) * s.y_gamma.at(c, i);
        w += gamma * (-lap_g.at(c, i) + react_g - gg0.at(c, i));
      }
      s.w.at(i, j) = w;
    }
  }
  return s;
}

State step(const State& state, const RunConfig& cfg, double t_next, StepStats* stats,
           int step_index) {
  return advance_step(cfg, state, t_next, stats, step_index, nullptr);
}

std::vector<ValidationError> validate_config(const RunConfig& cfg) {
  std::vector<ValidationError> errs;
  using Code = ValidationError::Code;
  if (!(cfg.dt > 0.0)) errs.push_back({Code::BadValue, "dt must be positive"});
  if (!(cfg.eps > 0.0 && cfg.eps < 1.0)) errs.push_back({Code::BadValue, "eps must lie in (0,1)"});
  if (!(cfg.tau >= 0.0)) errs.push_back({Code::BadValue, "tau must be nonnegative"});
  if (!(cfg.t_final >= 0.0)) errs.push_back({Code::BadValue, "t_final must be nonnegative"});
  if (cfg.newton.max_iter < 1) errs.push_back({Code::BadValue, "newton.max_iter must be >= 1"});
  if (!(cfg.newton.tol > 0.0)) errs.push_back({Code::BadValue, "newton.tol must be positive"});
  if (!errs.empty()) return errs;

  if (cfg.mode == SolveMode::Linearized) return errs;

  const StripGrid& g = cfg.grid;
  BulkField y0(g.nx, g.ny);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      double v = 0.0;
      for (const auto& p : cfg.y0) v += p.eval(g, i, j);
      y0.at(i, j) = v;
    }

  const Interval& db = cfg.pair.bulk_graph.domain();
  const Interval& dg = cfg.pair.boundary_graph.domain();
  bool domain_ok = true;
  for (double v : y0.v) {
    if (!db.contains_closure(v)) {
      errs.push_back({Code::DomainViolation,
                      "y0 value " + std::to_string(v) + " outside closure of D(beta)"});
      domain_ok = false;
      break;
    }
  }
  BoundaryField y0g = trace(g, y0);
  for (double v : y0g.v) {
    if (!dg.contains_closure(v)) {
      errs.push_back({Code::DomainViolation,
                      "y0 trace value " + std::to_string(v) + " outside closure of D(beta_Gamma)"});
      domain_ok = false;
      break;
    }
  }

  double m0 = mean_value(g, y0);
  bool interior = dg.interior(m0);
  if (!interior)
    errs.push_back({Code::MeanNotInterior,
                    "mean of y0 (" + std::to_string(m0) + ") not in the interior of D(beta_Gamma)"});

  auto samples = default_sample_grid(cfg.pair);
  auto eps_list = default_eps_list();
  eps_list.push_back(cfg.eps);
  CompatibilityReport comp = verify_compatibility(cfg.pair, eps_list, samples);
  if (!comp.ok) {
    errs.push_back({Code::CompatibilityViolation,
                    "pair violates the dominating-boundary compatibility: max slack " +
                        std::to_string(comp.max_slack) + " at r=" + std::to_string(comp.witness_r) +
                        ", eps=" + std::to_string(comp.witness_eps) +
                        (comp.domain_inclusion_ok ? "" : " (domain inclusion fails)")});
  }
  if (interior && domain_ok) {
    try {
      verify_coercivity(cfg.pair, m0, eps_list, samples);
    } catch (const CoercivityFailureError& e) {
      errs.push_back({Code::CoercivityFailure, e.what()});
    }
  }
  return errs;
}

RunResult run(const RunConfig& cfg, int save_every) {
  auto errs = validate_config(cfg);
  if (!errs.empty()) throw ConfigError(std::move(errs));
  if (save_every < 1) save_every = 1;

  const StripGrid& g = cfg.grid;
  RunResult res;
  int n = 0;
  if (cfg.t_final > 0.0) n = std::max<long long>(1, std::llround(cfg.t_final / cfg.dt));
  res.steps = n;
  res.dt_effective = n > 0 ? cfg.t_final / n : cfg.dt;

  State state = initial_state(cfg);
  const double m0 = mean_value(g, state.y);
  res.diagnostics.rows.push_back(record(state, nullptr, cfg, 0, 0));
  res.snapshots.push_back(state);
  res.snapshot_steps.push_back(0);

  StepperCache cache;
  for (int k = 1; k <= n; ++k) {
    double t_next = cfg.t_final * static_cast<double>(k) / n;
    StepStats stats;
    State next = advance_step(cfg, state, t_next, &stats, k, &cache);
    DiagnosticsRecord rec = record(next, &state, cfg, k, stats.newton_iterations);
    if (std::fabs(rec.mass - m0) > 1e-10)
      throw InvariantViolationError("mass drift " + std::to_string(rec.mass - m0) + " at step " +
                                    std::to_string(k));
    if (!rec.finite())
      throw InvariantViolationError("non-finite diagnostics at step " + std::to_string(k));
    res.diagnostics.rows.push_back(rec);
    if (k % save_every == 0 || k == n) {
      res.snapshots.push_back(next);
      res.snapshot_steps.push_back(k);
    }
    state = std::move(next);
  }
  return res;
}

EpsStudyResult eps_continuation(const RunConfig& cfg, const std::vector<double>& eps_list) {
  if (eps_list.size() < 2) throw std::invalid_argument("eps_continuation: need at least two levels");
  for (size_t k = 0; k < eps_list.size(); ++k) {
    if (!(eps_list[k] > 0.0 && eps_list[k] < 1.0))
      throw std::invalid_argument("eps_continuation: levels must lie in (0,1)");
    if (k > 0 && !(eps_list[k] < eps_list[k - 1]))
      throw std::invalid_argument("eps_continuation: levels must be strictly decreasing");
  }
  EpsStudyResult out;
  out.eps_list = eps_list;
  for (double e : eps_list) {
    RunConfig c = cfg;
    c.eps = e;
    out.runs.push_back(run(c, 1));
  }
  const StripGrid& g = cfg.grid;
  for (size_t k = 0; k + 1 < out.runs.size(); ++k) {
    const RunResult& a = out.runs[k];
    const RunResult& b = out.runs[k + 1];
    EpsDistance dist;
    dist.eps_coarse = eps_list[k];
    dist.eps_fine = eps_list[k + 1];
    double l2v = 0.0;
    for (size_t nidx = 0; nidx < a.snapshots.size(); ++nidx) {
      BulkField diff = axpy(-1.0, b.snapshots[nidx].y, a.snapshots[nidx].y);
      dist.dist_linf_h = std::max(dist.dist_linf_h, norm_h(g, diff));
      dist.dist_linf_dual = std::max(dist.dist_linf_dual, dual_norm(g, diff));
      if (nidx > 0) {
        double nv = norm_v(g, diff);
        l2v += a.dt_effective * nv * nv;
      }
    }
    dist.dist_l2_v = std::sqrt(l2v);
    out.distances.push_back(dist);
  }
  return out;
}

}  // namespace chisel
