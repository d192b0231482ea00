#pragma once

#include <chisel/errors.hpp>

#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace chisel {

/// Effective domain of a monotone graph: an interval with endpoint flags.
struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool lo_closed = false;
  bool hi_closed = false;

  bool contains(double r) const {
    if (r < lo || r > hi) return false;
    if (r == lo && !lo_closed) return false;
    if (r == hi && !hi_closed) return false;
    return true;
  }
  // membership in the closure of the interval
  bool contains_closure(double r) const { return r >= lo && r <= hi; }
  bool interior(double r) const { return r > lo && r < hi; }
  bool bounded_below() const { return std::isfinite(lo); }
  bool bounded_above() const { return std::isfinite(hi); }
};

/// A maximal monotone graph on R x R given as the subdifferential of a
/// convex potential. Three closed kinds:
///  - polynomial:  beta(r) = sum_k c_k r^{2k+1}, c_k >= 0 (odd, monotone)
///  - logarithmic: beta(r) = ln(1+r) - ln(1-r) on (-1,1)
///  - indicator:   beta = subdifferential of the indicator of [a,b]
class MonotoneGraph {
 public:
  enum class Kind { Polynomial, Logarithmic, Indicator };

  static MonotoneGraph polynomial(std::vector<double> odd_coeffs);
  static MonotoneGraph logarithmic();
  static MonotoneGraph indicator(double a, double b);

  Kind kind() const { return kind_; }
  const Interval& domain() const { return domain_; }
  std::string kind_name() const;

  // Single-valued evaluation in the domain interior (indicator: 0 on [a,b]).
  double beta(double r) const;
  double beta_prime(double r) const;
  // Convex primitive with value 0 at 0; +inf outside the domain closure.
  double convex_primitive(double r) const;

  const std::vector<double>& odd_coeffs() const { return odd_coeffs_; }
  double indicator_lo() const { return domain_.lo; }
  double indicator_hi() const { return domain_.hi; }

 private:
  Kind kind_ = Kind::Polynomial;
  Interval domain_;
  std::vector<double> odd_coeffs_;  // polynomial kind only
};

/// Globally Lipschitz perturbation with vanishing value at 0 and a
/// closed-form primitive.
class LipschitzPerturbation {
 public:
  enum class Kind { Linear, AffineTruncated };

  static LipschitzPerturbation linear(double slope);
  // slope * clamp(r, lo, hi) with lo <= 0 <= hi
  static LipschitzPerturbation affine_truncated(double slope, double lo, double hi);

  Kind kind() const { return kind_; }
  double value(double r) const;
  double primitive(double r) const;  // integral of value from 0 to r
  double lipschitz_constant() const { return std::abs(slope_); }
  double slope() const { return slope_; }

 private:
  Kind kind_ = Kind::Linear;
  double slope_ = 0.0;
  double lo_ = 0.0, hi_ = 0.0;
};

/// Bulk/boundary potential structure with the compatibility constants
/// (eta, C): |beta°(r)| <= eta |beta_Gamma°(r)| + C on D(beta_Gamma), and
/// D(beta_Gamma) contained in D(beta).
struct PotentialPair {
  MonotoneGraph bulk_graph;
  LipschitzPerturbation bulk_pi;
  MonotoneGraph boundary_graph;
  LipschitzPerturbation boundary_pi;
  double eta = 1.0;
  double c_compat = 0.0;
};

struct CoercivityConstants {
  double delta0 = 0.0;
  double c0 = 0.0;
  double m0 = 0.0;
};

struct CompatibilityReport {
  bool ok = false;
  bool domain_inclusion_ok = false;
  double max_slack = 0.0;  // max of |beta_eps| - eta |beta_gamma_eps| - C
  double witness_r = 0.0;
  double witness_eps = 0.0;
};

// --- graph operations -------------------------------------------------------

// Minimal-modulus selection beta°(r); throws OutOfDomainError outside D(beta).
double minimal_section(const MonotoneGraph& graph, double r);

// Resolvent J solving J + eps*beta(J) ∋ r (total; unique J).
double resolvent(const MonotoneGraph& graph, double eps, double r);

// Yosida approximation beta_eps(r) = (r - resolvent(r)) / eps.
double yosida(const MonotoneGraph& graph, double eps, double r);

// Derivative of the Yosida approximation (0 <= value <= 1/eps).
double yosida_prime(const MonotoneGraph& graph, double eps, double r);

// Primitive of the Yosida approximation from 0 (Moreau envelope form).
double yosida_primitive(const MonotoneGraph& graph, double eps, double r);

// --- paired boundary operations (boundary graph at level eta*eps) -----------

double boundary_yosida(const PotentialPair& pair, double eps, double r);
double boundary_yosida_prime(const PotentialPair& pair, double eps, double r);
double boundary_yosida_primitive(const PotentialPair& pair, double eps, double r);

// --- structural verifiers ----------------------------------------------------

// Default sample grid covering the boundary domain plus a margin outside it.
std::vector<double> default_sample_grid(const PotentialPair& pair, int n = 401);
std::vector<double> default_eps_list();

CompatibilityReport verify_compatibility(const PotentialPair& pair,
                                         const std::vector<double>& eps_list,
                                         const std::vector<double>& samples);

// Finds (delta0, C0) with beta_eps(r)(r - m0) >= delta0 |beta_eps(r)| - C0 on
// the samples for all listed levels; throws CoercivityFailureError when no
// constants with delta0 >= 1e-6 and C0 <= 1e6 exist.
CoercivityConstants verify_coercivity(const MonotoneGraph& graph, double m0,
                                      const std::vector<double>& eps_list,
                                      const std::vector<double>& samples);

// Pair version: bulk family at eps, boundary family at eta*eps; returns the
// common constants (min delta0, max C0).
CoercivityConstants verify_coercivity(const PotentialPair& pair, double m0,
                                      const std::vector<double>& eps_list,
                                      const std::vector<double>& samples);

}  // namespace chisel
