#pragma once

// Test-side oracles, kept independent of the implementation paths they check.

#include <chisel/potential.hpp>

#include <cmath>
#include <functional>
#include <stdexcept>

namespace chisel::test {

// Pure-bisection resolvent for J + eps*beta(J) ∋ r. Uses only the graph's
// pointwise closed forms; no Newton, no clamp shortcut.
inline double bisection_resolvent(const MonotoneGraph& g, double eps, double r) {
  auto residual = [&](double x) -> double {
    switch (g.kind()) {
      case MonotoneGraph::Kind::Indicator:
        // single-valued part only; endpoints handled by bracketing inside [a,b]
        return x - r;
      default:
        return x + eps * g.beta(x) - r;
    }
  };
  double lo, hi;
  if (g.kind() == MonotoneGraph::Kind::Indicator) {
    // bracket inside [a,b]: the resolvent of the subdifferential is the
    // projection; bisect on x - r over [a,b]
    lo = g.indicator_lo();
    hi = g.indicator_hi();
    if (residual(lo) >= 0.0) return lo;
    if (residual(hi) <= 0.0) return hi;
  } else if (g.kind() == MonotoneGraph::Kind::Logarithmic) {
    lo = -1.0;
    hi = 1.0;
    double u = 0.5;
    while (residual(hi - u) < 0.0 && u > 1e-290) u *= 0.5;
    hi -= u;
    u = 0.5;
    while (residual(lo + u) > 0.0 && u > 1e-290) u *= 0.5;
    lo += u;
  } else {
    lo = std::min(r, 0.0);
    hi = std::max(r, 0.0);
  }
  for (int it = 0; it < 300 && hi - lo > 0.0; ++it) {
    double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (residual(mid) > 0.0)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

inline double bisection_yosida(const MonotoneGraph& g, double eps, double r) {
  return (r - bisection_resolvent(g, eps, r)) / eps;
}

// Adaptive Simpson quadrature to a relative tolerance.
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double rel_tol = 1e-10) {
  std::function<double(double, double, double, double, double, double, int)> rec =
      [&](double lo, double hi, double flo, double fmid, double fhi, double whole,
          int depth) -> double {
    double mid = 0.5 * (lo + hi);
    double lm = 0.5 * (lo + mid), rm = 0.5 * (mid + hi);
    double flm = f(lm), frm = f(rm);
    double left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid);
    double right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi);
    double err = left + right - whole;
    if (depth > 40 || std::fabs(err) <= 15.0 * rel_tol * std::max(1e-300, std::fabs(left + right)))
      return left + right + err / 15.0;
    return rec(lo, mid, flo, flm, fmid, left, depth + 1) +
           rec(mid, hi, fmid, frm, fhi, right, depth + 1);
  };
  if (a == b) return 0.0;
  double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return rec(a, b, fa, fm, fb, whole, 0);
}

// Quadrature route for the Yosida primitive (checks the Moreau-identity route).
inline double quadrature_yosida_primitive(const MonotoneGraph& g, double eps, double r) {
  if (r == 0.0) return 0.0;
  auto f = [&](double s) { return yosida(g, eps, s); };
  return adaptive_simpson(f, 0.0, r, 1e-11);
}

}  // namespace chisel::test
