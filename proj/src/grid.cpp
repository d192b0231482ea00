#include <chisel/grid.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace chisel {

StripGrid::StripGrid(int nx, int ny, double lx, double ly)
    : nx(nx), ny(ny), lx(lx), ly(ly) {
  if (nx < 4) throw std::invalid_argument("StripGrid: nx must be >= 4");
  if (ny < 3) throw std::invalid_argument("StripGrid: ny must be >= 3");
  if (!(lx > 0.0) || !(ly > 0.0)) throw std::invalid_argument("StripGrid: lengths must be positive");
  hx = lx / nx;
  hy = ly / (ny - 1);
}

BulkField bulk_laplacian(const StripGrid& g, const BulkField& f) {
  BulkField out(g.nx, g.ny);
  const double ihx2 = 1.0 / (g.hx * g.hx);
  const double ihy2 = 1.0 / (g.hy * g.hy);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      double c = f.at(i, j);
      double lap = (f.at(g.right(i), j) + f.at(g.left(i), j) - 2.0 * c) * ihx2;
      if (j == 0) {
        lap += 2.0 * (f.at(i, 1) - c) * ihy2;
      } else if (j == g.ny - 1) {
        lap += 2.0 * (f.at(i, g.ny - 2) - c) * ihy2;
      } else {
        lap += (f.at(i, j + 1) + f.at(i, j - 1) - 2.0 * c) * ihy2;
      }
      out.at(i, j) = lap;
    }
  }
  return out;
}

BoundaryField laplace_beltrami(const StripGrid& g, const BoundaryField& b) {
  BoundaryField out(g.nx);
  const double ihx2 = 1.0 / (g.hx * g.hx);
  for (int c = 0; c < 2; ++c)
    for (int i = 0; i < g.nx; ++i)
      out.at(c, i) = (b.at(c, g.right(i)) + b.at(c, g.left(i)) - 2.0 * b.at(c, i)) * ihx2;
  return out;
}

BoundaryField trace(const StripGrid& g, const BulkField& f) {
  BoundaryField out(g.nx);
  for (int i = 0; i < g.nx; ++i) {
    out.at(0, i) = f.at(i, 0);
    out.at(1, i) = f.at(i, g.ny - 1);
  }
  return out;
}

BoundaryField normal_derivative(const StripGrid& g, const BulkField& f) {
  BoundaryField out(g.nx);
  const double ihy = 1.0 / g.hy;
  const int top = g.ny - 1;
  for (int i = 0; i < g.nx; ++i) {
    out.at(0, i) = -(-1.5 * f.at(i, 0) + 2.0 * f.at(i, 1) - 0.5 * f.at(i, 2)) * ihy;
    out.at(1, i) = (1.5 * f.at(i, top) - 2.0 * f.at(i, top - 1) + 0.5 * f.at(i, top - 2)) * ihy;
  }
  return out;
}

double mean_value(const StripGrid& g, const BulkField& f) {
  double s = 0.0;
  for (int j = 0; j < g.ny; ++j) {
    double mu = g.bulk_measure(j);
    double row = 0.0;
    for (int i = 0; i < g.nx; ++i) row += f.at(i, j);
    s += mu * row;
  }
  return s / g.area();
}

double grad_inner(const StripGrid& g, const BulkField& f, const BulkField& h) {
  // horizontal edges weighted hx*hy (hx*hy/2 on boundary rows), vertical
  // edges hx*hy; forward differences
  double s = 0.0;
  const double wx_int = g.hy / g.hx;       // hx*hy / hx^2
  const double wx_bnd = 0.5 * g.hy / g.hx;
  const double wy = g.hx / g.hy;           // hx*hy / hy^2
  for (int j = 0; j < g.ny; ++j) {
    double wx = (j == 0 || j == g.ny - 1) ? wx_bnd : wx_int;
    for (int i = 0; i < g.nx; ++i) {
      int ir = g.right(i);
      s += wx * (f.at(ir, j) - f.at(i, j)) * (h.at(ir, j) - h.at(i, j));
    }
  }
  for (int j = 0; j + 1 < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      s += wy * (f.at(i, j + 1) - f.at(i, j)) * (h.at(i, j + 1) - h.at(i, j));
  return s;
}

double grad_inner_gamma(const StripGrid& g, const BoundaryField& b, const BoundaryField& c) {
  double s = 0.0;
  const double w = 1.0 / g.hx;  // hx / hx^2
  for (int comp = 0; comp < 2; ++comp) {
    for (int i = 0; i < g.nx; ++i) {
      int ir = g.right(i);
      s += w * (b.at(comp, ir) - b.at(comp, i)) * (c.at(comp, ir) - c.at(comp, i));
    }
  }
  return s;
}

double inner_h(const StripGrid& g, const BulkField& f, const BulkField& h) {
  double s = 0.0;
  for (int j = 0; j < g.ny; ++j) {
    double mu = g.bulk_measure(j);
    double row = 0.0;
    for (int i = 0; i < g.nx; ++i) row += f.at(i, j) * h.at(i, j);
    s += mu * row;
  }
  return s;
}

double inner_h_gamma(const StripGrid& g, const BoundaryField& b, const BoundaryField& c) {
  double s = 0.0;
  for (int comp = 0; comp < 2; ++comp)
    for (int i = 0; i < g.nx; ++i) s += b.at(comp, i) * c.at(comp, i);
  return s * g.surface_measure();
}

double norm_h(const StripGrid& g, const BulkField& f) { return std::sqrt(inner_h(g, f, f)); }

double grad_seminorm(const StripGrid& g, const BulkField& f) {
  return std::sqrt(std::max(0.0, grad_inner(g, f, f)));
}

double norm_v(const StripGrid& g, const BulkField& f) {
  return std::sqrt(inner_h(g, f, f) + std::max(0.0, grad_inner(g, f, f)));
}

double norm_h_gamma(const StripGrid& g, const BoundaryField& b) {
  return std::sqrt(inner_h_gamma(g, b, b));
}

double grad_seminorm_gamma(const StripGrid& g, const BoundaryField& b) {
  return std::sqrt(std::max(0.0, grad_inner_gamma(g, b, b)));
}

double norm_v_gamma(const StripGrid& g, const BoundaryField& b) {
  return std::sqrt(inner_h_gamma(g, b, b) + std::max(0.0, grad_inner_gamma(g, b, b)));
}

double norm_inf(const BulkField& f) {
  double m = 0.0;
  for (double x : f.v) m = std::max(m, std::fabs(x));
  return m;
}

double norm_inf_gamma(const BoundaryField& b) {
  double m = 0.0;
  for (double x : b.v) m = std::max(m, std::fabs(x));
  return m;
}

double fourier_eigenvalue(const StripGrid& g, int k) {
  double theta = 2.0 * std::numbers::pi * k * g.hx / g.lx;
  return (2.0 - 2.0 * std::cos(theta)) / (g.hx * g.hx);
}

BulkField axpy(double alpha, const BulkField& x, const BulkField& y) {
  BulkField out = y;
  for (size_t n = 0; n < out.v.size(); ++n) out.v[n] += alpha * x.v[n];
  return out;
}

BoundaryField axpy(double alpha, const BoundaryField& x, const BoundaryField& y) {
  BoundaryField out = y;
  for (size_t n = 0; n < out.v.size(); ++n) out.v[n] += alpha * x.v[n];
  return out;
}

namespace {

void remove_mean(const StripGrid& g, BulkField& f) {
  double m = mean_value(g, f);
  for (double& x : f.v) x -= m;
}

}  // namespace

BulkField neumann_solve(const StripGrid& g, const BulkField& v) {
  double m = mean_value(g, v);
  if (std::fabs(m) > 1e-10)
    throw NonzeroMeanError("neumann_solve: datum has mean " + std::to_string(m));

  // CG in the lumped inner product on the mean-zero subspace for -L_h u = v.
  BulkField u(g.nx, g.ny, 0.0);
  BulkField r = v;
  remove_mean(g, r);
  BulkField p = r;
  double rr = inner_h(g, r, r);
  const double rr0 = rr;
  if (rr0 == 0.0) return u;
  const double tol2 = 1e-24 * rr0;  // relative residual 1e-12
  const int max_iter = 4 * g.nx * g.ny + 100;
  for (int it = 0; it < max_iter && rr > tol2; ++it) {
    BulkField ap = bulk_laplacian(g, p);
    for (double& x : ap.v) x = -x;
    remove_mean(g, ap);
    double pap = inner_h(g, p, ap);
    if (pap <= 0.0) break;
    double alpha = rr / pap;
    for (size_t n = 0; n < u.v.size(); ++n) u.v[n] += alpha * p.v[n];
    for (size_t n = 0; n < r.v.size(); ++n) r.v[n] -= alpha * ap.v[n];
    double rr_new = inner_h(g, r, r);
    double beta = rr_new / rr;
    rr = rr_new;
    for (size_t n = 0; n < p.v.size(); ++n) p.v[n] = r.v[n] + beta * p.v[n];
  }
  remove_mean(g, u);
  return u;
}

double dual_norm(const StripGrid& g, const BulkField& v) {
  double m = mean_value(g, v);
  BulkField v0 = v;
  for (double& x : v0.v) x -= m;
  BulkField u = neumann_solve(g, v0);
  // a(u,u) = (v0, u)_mu by the defining identity
  double grad2 = inner_h(g, v0, u);
  return std::sqrt(std::max(0.0, grad2) + m * m);
}

}  // namespace chisel
