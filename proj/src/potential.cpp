#include <chisel/potential.hpp>

#include <algorithm>
#include <cmath>

namespace chisel {

namespace {

constexpr double kResolventTol = 1e-13;

double clamp(double r, double lo, double hi) { return std::min(std::max(r, lo), hi); }

// x*ln(x) extended by 0 at x = 0.
double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

}  // namespace

// --- MonotoneGraph -----------------------------------------------------------

MonotoneGraph MonotoneGraph::polynomial(std::vector<double> odd_coeffs) {
  for (double c : odd_coeffs) {
    if (!(c >= 0.0))
      throw std::invalid_argument("polynomial graph needs nonnegative odd coefficients");
  }
  bool any = false;
  for (double c : odd_coeffs) any = any || c > 0.0;
  if (!any) throw std::invalid_argument("polynomial graph needs a positive coefficient");
  MonotoneGraph g;
  g.kind_ = Kind::Polynomial;
  g.domain_ = Interval{};  // all of R
  g.odd_coeffs_ = std::move(odd_coeffs);
  return g;
}

MonotoneGraph MonotoneGraph::logarithmic() {
  MonotoneGraph g;
  g.kind_ = Kind::Logarithmic;
  g.domain_ = Interval{-1.0, 1.0, false, false};
  return g;
}

MonotoneGraph MonotoneGraph::indicator(double a, double b) {
  if (!(a < b)) throw std::invalid_argument("indicator graph needs a < b");
  if (!(a <= 0.0 && 0.0 <= b))
    throw std::invalid_argument("indicator interval must contain 0");
  MonotoneGraph g;
  g.kind_ = Kind::Indicator;
  g.domain_ = Interval{a, b, true, true};
  return g;
}

std::string MonotoneGraph::kind_name() const {
  switch (kind_) {
    case Kind::Polynomial: return "polynomial";
    case Kind::Logarithmic: return "logarithmic";
    case Kind::Indicator: return "indicator";
  }
  return "?";
}

double MonotoneGraph::beta(double r) const {
  switch (kind_) {
    case Kind::Polynomial: {
      double s = 0.0;
      double p = r;  // r^{2k+1}
      for (double c : odd_coeffs_) {
        s += c * p;
        p *= r * r;
      }
      return s;
    }
    case Kind::Logarithmic:
      return std::log1p(r) - std::log1p(-r);
    case Kind::Indicator:
      return 0.0;
  }
  return 0.0;
}

double MonotoneGraph::beta_prime(double r) const {
  switch (kind_) {
    case Kind::Polynomial: {
      double s = 0.0;
      double p = 1.0;  // r^{2k}
      for (size_t k = 0; k < odd_coeffs_.size(); ++k) {
        s += odd_coeffs_[k] * static_cast<double>(2 * k + 1) * p;
        p *= r * r;
      }
      return s;
    }
    case Kind::Logarithmic:
      return 1.0 / (1.0 + r) + 1.0 / (1.0 - r);
    case Kind::Indicator:
      return 0.0;
  }
  return 0.0;
}

double MonotoneGraph::convex_primitive(double r) const {
  switch (kind_) {
    case Kind::Polynomial: {
      double s = 0.0;
      double p = r * r;  // r^{2k+2}
      for (size_t k = 0; k < odd_coeffs_.size(); ++k) {
        s += odd_coeffs_[k] * p / static_cast<double>(2 * k + 2);
        p *= r * r;
      }
      return s;
    }
    case Kind::Logarithmic:
      if (!domain_.contains_closure(r)) return std::numeric_limits<double>::infinity();
      return xlogx(1.0 + r) + xlogx(1.0 - r);
    case Kind::Indicator:
      return domain_.contains_closure(r) ? 0.0 : std::numeric_limits<double>::infinity();
  }
  return 0.0;
}

// --- LipschitzPerturbation ---------------------------------------------------

LipschitzPerturbation LipschitzPerturbation::linear(double slope) {
  LipschitzPerturbation p;
  p.kind_ = Kind::Linear;
  p.slope_ = slope;
  return p;
}

LipschitzPerturbation LipschitzPerturbation::affine_truncated(double slope, double lo, double hi) {
  if (!(lo <= 0.0 && 0.0 <= hi && lo < hi))
    throw std::invalid_argument("affine_truncated cutoffs must straddle 0");
  LipschitzPerturbation p;
  p.kind_ = Kind::AffineTruncated;
  p.slope_ = slope;
  p.lo_ = lo;
  p.hi_ = hi;
  return p;
}

double LipschitzPerturbation::value(double r) const {
  if (kind_ == Kind::Linear) return slope_ * r;
  return slope_ * clamp(r, lo_, hi_);
}

double LipschitzPerturbation::primitive(double r) const {
  if (kind_ == Kind::Linear) return 0.5 * slope_ * r * r;
  if (r >= lo_ && r <= hi_) return 0.5 * slope_ * r * r;
  if (r > hi_) return 0.5 * slope_ * hi_ * hi_ + slope_ * hi_ * (r - hi_);
  return 0.5 * slope_ * lo_ * lo_ + slope_ * lo_ * (r - lo_);
}

// --- graph operations --------------------------------------------------------

double minimal_section(const MonotoneGraph& graph, double r) {
  const Interval& d = graph.domain();
  if (!d.contains(r))
    throw OutOfDomainError("minimal_section: r=" + std::to_string(r) + " outside D(beta) of " +
                           graph.kind_name() + " graph");
  // Indicator: 0 in the interior and 0 at closed endpoints (least-modulus
  // element of the half-line). Smooth kinds: the function value.
  return graph.beta(r);
}

namespace {

// Safeguarded Newton/bisection for f(J) = J + eps*beta(J) - r on a bracket
// strictly inside the graph domain. f is strictly increasing.
double solve_inclusion(const MonotoneGraph& g, double eps, double r, double lo, double hi) {
  auto f = [&](double x) { return x + eps * g.beta(x) - r; };
  double flo = f(lo);
  double fhi = f(hi);
  if (flo >= 0.0) return lo;
  if (fhi <= 0.0) return hi;
  double x = clamp(r, lo, hi);
  for (int it = 0; it < 200; ++it) {
    double fx = f(x);
    if (fx == 0.0) return x;
    if (fx > 0.0)
      hi = x;
    else
      lo = x;
    double fpx = 1.0 + eps * g.beta_prime(x);
    double xn = x - fx / fpx;
    if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
    double scale = std::max(1.0, std::fabs(xn));
    if (std::fabs(xn - x) <= 1e-16 * scale || hi - lo <= 1e-16 * scale) return xn;
    x = xn;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double resolvent(const MonotoneGraph& graph, double eps, double r) {
  if (!(eps > 0.0)) throw std::invalid_argument("resolvent: eps must be positive");
  switch (graph.kind()) {
    case MonotoneGraph::Kind::Indicator:
      // J + eps*∂I(J) ∋ r  <=>  J = clamp(r, a, b)
      return clamp(r, graph.indicator_lo(), graph.indicator_hi());
    case MonotoneGraph::Kind::Polynomial: {
      if (r == 0.0) return 0.0;
      // f(0) = -r and f(r) = eps*beta(r) have opposite signs: bracket [min(r,0), max(r,0)].
      return solve_inclusion(graph, eps, r, std::min(r, 0.0), std::max(r, 0.0));
    }
    case MonotoneGraph::Kind::Logarithmic: {
      if (r == 0.0) return 0.0;
      // bracket within (-1,1), grown geometrically toward the endpoints until
      // the residual changes sign
      double lo = std::max(-1.0 + 1e-4, std::min(r, 0.0));
      double hi = std::min(1.0 - 1e-4, std::max(r, 0.0));
      auto f = [&](double x) { return x + eps * graph.beta(x) - r; };
      double u = 1e-4;
      while (f(hi) < 0.0 && u > 1e-300) {
        u *= 0.25;
        hi = 1.0 - u;
      }
      u = 1e-4;
      while (f(lo) > 0.0 && u > 1e-300) {
        u *= 0.25;
        lo = -1.0 + u;
      }
      return solve_inclusion(graph, eps, r, lo, hi);
    }
  }
  return r;
}

double yosida(const MonotoneGraph& graph, double eps, double r) {
  return (r - resolvent(graph, eps, r)) / eps;
}

double yosida_prime(const MonotoneGraph& graph, double eps, double r) {
  switch (graph.kind()) {
    case MonotoneGraph::Kind::Indicator:
      return (r < graph.indicator_lo() || r > graph.indicator_hi()) ? 1.0 / eps : 0.0;
    default: {
      double j = resolvent(graph, eps, r);
      double bp = graph.beta_prime(j);
      return bp / (1.0 + eps * bp);
    }
  }
}

double yosida_primitive(const MonotoneGraph& graph, double eps, double r) {
  // Moreau envelope: primitive = beta_hat(J) + (eps/2) * beta_eps(r)^2.
  double j = resolvent(graph, eps, r);
  double be = (r - j) / eps;
  double v = graph.convex_primitive(j) + 0.5 * eps * be * be;
  return v < 0.0 ? 0.0 : v;
}

// --- paired boundary operations ----------------------------------------------

double boundary_yosida(const PotentialPair& pair, double eps, double r) {
  return yosida(pair.boundary_graph, pair.eta * eps, r);
}

double boundary_yosida_prime(const PotentialPair& pair, double eps, double r) {
  return yosida_prime(pair.boundary_graph, pair.eta * eps, r);
}

double boundary_yosida_primitive(const PotentialPair& pair, double eps, double r) {
  return yosida_primitive(pair.boundary_graph, pair.eta * eps, r);
}

// --- structural verifiers ------------------------------------------------------

std::vector<double> default_sample_grid(const PotentialPair& pair, int n) {
  const Interval& dg = pair.boundary_graph.domain();
  double lo = dg.bounded_below() ? dg.lo - 1.0 : -3.0;
  double hi = dg.bounded_above() ? dg.hi + 1.0 : 3.0;
  std::vector<double> s(n);
  for (int i = 0; i < n; ++i) s[i] = lo + (hi - lo) * static_cast<double>(i) / (n - 1);
  return s;
}

std::vector<double> default_eps_list() { return {0.4, 0.2, 0.1, 0.05, 0.02}; }

CompatibilityReport verify_compatibility(const PotentialPair& pair,
                                         const std::vector<double>& eps_list,
                                         const std::vector<double>& samples) {
  CompatibilityReport rep;
  const Interval& db = pair.bulk_graph.domain();
  const Interval& dg = pair.boundary_graph.domain();
  rep.domain_inclusion_ok =
      dg.lo >= db.lo && dg.hi <= db.hi &&
      !(dg.lo == db.lo && dg.lo_closed && !db.lo_closed) &&
      !(dg.hi == db.hi && dg.hi_closed && !db.hi_closed);
  rep.max_slack = -std::numeric_limits<double>::infinity();
  for (double eps : eps_list) {
    for (double r : samples) {
      double be = std::fabs(yosida(pair.bulk_graph, eps, r));
      double bg = std::fabs(boundary_yosida(pair, eps, r));
      double slack = be - pair.eta * bg - pair.c_compat;
      if (slack > rep.max_slack) {
        rep.max_slack = slack;
        rep.witness_r = r;
        rep.witness_eps = eps;
      }
    }
  }
  rep.ok = rep.domain_inclusion_ok && rep.max_slack <= 1e-12;
  return rep;
}

namespace {

CoercivityConstants coercivity_for_family(
    const std::vector<std::pair<double, double>>& value_sample_pairs, double m0) {
  // For fixed delta0 the smallest admissible C0 is
  //   max over samples of (delta0*|b| - b*(r - m0), 0).
  // Scan a descending delta0 ladder and take the first level whose C0 fits.
  for (double delta0 = 1.0; delta0 >= 1e-6; delta0 *= 0.5) {
    double c0 = 0.0;
    for (const auto& [r, b] : value_sample_pairs) {
      double need = delta0 * std::fabs(b) - b * (r - m0);
      if (need > c0) c0 = need;
    }
    if (c0 <= 1e6) return CoercivityConstants{delta0, c0, m0};
  }
  throw CoercivityFailureError(
      "verify_coercivity: no (delta0, C0) with delta0 >= 1e-6, C0 <= 1e6; "
      "m0=" + std::to_string(m0) + " is too close to the domain boundary");
}

}  // namespace

CoercivityConstants verify_coercivity(const MonotoneGraph& graph, double m0,
                                      const std::vector<double>& eps_list,
                                      const std::vector<double>& samples) {
  std::vector<std::pair<double, double>> vals;
  vals.reserve(eps_list.size() * samples.size());
  for (double eps : eps_list)
    for (double r : samples) vals.emplace_back(r, yosida(graph, eps, r));
  return coercivity_for_family(vals, m0);
}

CoercivityConstants verify_coercivity(const PotentialPair& pair, double m0,
                                      const std::vector<double>& eps_list,
                                      const std::vector<double>& samples) {
  std::vector<std::pair<double, double>> vals;
  vals.reserve(2 * eps_list.size() * samples.size());
  for (double eps : eps_list) {
    for (double r : samples) {
      vals.emplace_back(r, yosida(pair.bulk_graph, eps, r));
      vals.emplace_back(r, boundary_yosida(pair, eps, r));
    }
  }
  return coercivity_for_family(vals, m0);
}

}  // namespace chisel
