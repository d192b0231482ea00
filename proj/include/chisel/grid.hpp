#pragma once

#include <chisel/errors.hpp>

#include <cmath>
#include <vector>

namespace chisel {

struct StripGrid;

/// Nodal scalar field on the full strip, row-major (y-major): index j*nx + i.
struct BulkField {
  int nx = 0, ny = 0;
  std::vector<double> v;

  BulkField() = default;
  BulkField(int nx, int ny, double fill = 0.0)
      : nx(nx), ny(ny), v(static_cast<size_t>(nx) * ny, fill) {}

  double& at(int i, int j) { return v[static_cast<size_t>(j) * nx + i]; }
  double at(int i, int j) const { return v[static_cast<size_t>(j) * nx + i]; }
  size_t size() const { return v.size(); }
};

/// Scalar field on the two boundary components: row 0 = bottom (y=0),
/// row 1 = top (y=ly). Index c*nx + i.
struct BoundaryField {
  int nx = 0;
  std::vector<double> v;

  BoundaryField() = default;
  explicit BoundaryField(int nx, double fill = 0.0)
      : nx(nx), v(static_cast<size_t>(2) * nx, fill) {}

  double& at(int comp, int i) { return v[static_cast<size_t>(comp) * nx + i]; }
  double at(int comp, int i) const { return v[static_cast<size_t>(comp) * nx + i]; }
  size_t size() const { return v.size(); }
};

/// Tensor grid on (0,lx) x (0,ly), periodic in x, with both boundary rows
/// carried as nodes. Lumped measures: hx*hy at interior nodes, hx*hy/2 on the
/// boundary rows; surface measure hx per boundary node.
struct StripGrid {
  int nx = 0, ny = 0;
  double lx = 0.0, ly = 0.0;
  double hx = 0.0, hy = 0.0;

  StripGrid() = default;
  StripGrid(int nx, int ny, double lx, double ly);

  double bulk_measure(int j) const {
    return (j == 0 || j == ny - 1) ? 0.5 * hx * hy : hx * hy;
  }
  double surface_measure() const { return hx; }
  double area() const { return lx * ly; }

  int left(int i) const { return i == 0 ? nx - 1 : i - 1; }
  int right(int i) const { return i == nx - 1 ? 0 : i + 1; }

  BulkField make_bulk(double fill = 0.0) const { return BulkField(nx, ny, fill); }
  BoundaryField make_boundary(double fill = 0.0) const { return BoundaryField(nx, fill); }
};

// --- linear operators ---------------------------------------------------------

// Lumped 5-point Laplacian, periodic in x; boundary rows carry the one-sided
// stencil consistent with the lumped variational form (homogeneous Neumann).
BulkField bulk_laplacian(const StripGrid& g, const BulkField& f);

// Periodic second difference along each boundary component.
BoundaryField laplace_beltrami(const StripGrid& g, const BoundaryField& b);

// Restriction to the two boundary rows.
BoundaryField trace(const StripGrid& g, const BulkField& f);

// Outward normal derivative, second-order one-sided stencil.
BoundaryField normal_derivative(const StripGrid& g, const BulkField& f);

// Lumped-measure average over the strip.
double mean_value(const StripGrid& g, const BulkField& f);

// Inverse Neumann operator: u with mean 0 and a(u,z) = (v,z)_mu for all z.
// Conjugate gradient on the mean-zero subspace, relative residual <= 1e-12.
// Throws NonzeroMeanError when |mean_value(v)| > 1e-10.
BulkField neumann_solve(const StripGrid& g, const BulkField& v);

// Dual norm: sqrt(|grad N(v - v_mean)|^2 + v_mean^2).
double dual_norm(const StripGrid& g, const BulkField& v);

// --- bilinear forms and norms ---------------------------------------------------

// Edge-measure Dirichlet form a(f,g) (forward differences, periodic in x).
double grad_inner(const StripGrid& g, const BulkField& f, const BulkField& h);
// Boundary Dirichlet form along the two components.
double grad_inner_gamma(const StripGrid& g, const BoundaryField& b, const BoundaryField& c);

double inner_h(const StripGrid& g, const BulkField& f, const BulkField& h);
double inner_h_gamma(const StripGrid& g, const BoundaryField& b, const BoundaryField& c);

double norm_h(const StripGrid& g, const BulkField& f);
double grad_seminorm(const StripGrid& g, const BulkField& f);
double norm_v(const StripGrid& g, const BulkField& f);
double norm_h_gamma(const StripGrid& g, const BoundaryField& b);
double grad_seminorm_gamma(const StripGrid& g, const BoundaryField& b);
double norm_v_gamma(const StripGrid& g, const BoundaryField& b);
double norm_inf(const BulkField& f);
double norm_inf_gamma(const BoundaryField& b);

// Discrete eigenvalue of the periodic second difference for mode k.
double fourier_eigenvalue(const StripGrid& g, int k);

// --- algebra helpers ------------------------------------------------------------

BulkField axpy(double alpha, const BulkField& x, const BulkField& y);  // alpha*x + y
BoundaryField axpy(double alpha, const BoundaryField& x, const BoundaryField& y);

}  // namespace chisel
