#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chisel/diagnostics.hpp>
#include <chisel/solver.hpp>

#include "oracles.hpp"

#include <cmath>
#include <sstream>

using namespace chisel;

namespace {

PotentialPair regular_pair() {
  PotentialPair p;
  p.bulk_graph = MonotoneGraph::polynomial({0.0, 1.0});
  p.boundary_graph = MonotoneGraph::polynomial({0.0, 1.0});
  p.bulk_pi = LipschitzPerturbation::linear(-1.0);
  p.boundary_pi = LipschitzPerturbation::linear(-1.0);
  p.eta = 1.0;
  p.c_compat = 0.0;
  return p;
}

PotentialPair log_pair() {
  PotentialPair p;
  p.bulk_graph = MonotoneGraph::logarithmic();
  p.boundary_graph = MonotoneGraph::logarithmic();
  p.bulk_pi = LipschitzPerturbation::linear(-2.0);
  p.boundary_pi = LipschitzPerturbation::linear(-2.0);
  p.eta = 1.0;
  p.c_compat = 0.0;
  return p;
}

RunConfig base_config() {
  RunConfig cfg;
  cfg.tau = 1.0;
  cfg.eps = 0.1;
  cfg.dt = 1e-3;
  cfg.t_final = 0.01;
  cfg.grid = StripGrid(16, 9, 1.0, 0.5);
  cfg.pair = regular_pair();
  cfg.lambda.base = {FieldProfile::constant(1.0)};
  cfg.lambda_gamma.base = {FieldProfile::constant(1.0)};
  cfg.y0 = {FieldProfile::fourier(0.2, 1)};
  return cfg;
}

}  // namespace

TEST_CASE("record on the zero state") {
  RunConfig cfg = base_config();
  cfg.y0 = {FieldProfile::constant(0.0)};
  State s = initial_state(cfg);
  DiagnosticsRecord r = record(s, nullptr, cfg, 0, 0);
  CHECK(r.mass == 0.0);
  CHECK(r.energy == 0.0);
  CHECK(r.norm_y_h == 0.0);
  CHECK(r.norm_y_dual == 0.0);
  CHECK(r.norm_xi_h == 0.0);
  CHECK(r.max_abs_y == 0.0);
}

TEST_CASE("record constant-state energy closed form") {
  RunConfig cfg = base_config();
  const double c = 0.3;
  cfg.y0 = {FieldProfile::constant(c)};
  State s = initial_state(cfg);
  DiagnosticsRecord r = record(s, nullptr, cfg, 0, 0);
  double area = cfg.grid.lx * cfg.grid.ly;
  double bulk = yosida_primitive(cfg.pair.bulk_graph, cfg.eps, c) + cfg.pair.bulk_pi.primitive(c);
  double bnd = boundary_yosida_primitive(cfg.pair, cfg.eps, c) + cfg.pair.boundary_pi.primitive(c);
  double expect = area * bulk + 2.0 * cfg.grid.lx * bnd;
  CHECK(r.energy == doctest::Approx(expect).epsilon(1e-12));
  CHECK(r.mass == doctest::Approx(c).epsilon(1e-13));
}

TEST_CASE("energy matches an independent quadrature re-assembly") {
  RunConfig cfg = base_config();
  cfg.t_final = 5e-3;
  RunResult run_out = run(cfg, 1);
  const State& s = run_out.snapshots.back();
  const StripGrid& g = cfg.grid;

  // independent path: adaptive quadrature for the convex primitives, explicit
  // loops for the Dirichlet halves
  double e = 0.0;
  for (int j = 0; j < g.ny; ++j) {
    double wx = (j == 0 || j == g.ny - 1) ? 0.5 : 1.0;
    for (int i = 0; i < g.nx; ++i) {
      int ir = g.right(i);
      double dx = (s.y.at(ir, j) - s.y.at(i, j)) / g.hx;
      e += 0.5 * wx * g.hx * g.hy * dx * dx;
      if (j + 1 < g.ny) {
        double dy = (s.y.at(i, j + 1) - s.y.at(i, j)) / g.hy;
        e += 0.5 * g.hx * g.hy * dy * dy;
      }
    }
  }
  for (int c = 0; c < 2; ++c)
    for (int i = 0; i < g.nx; ++i) {
      int ir = g.right(i);
      double dx = (s.y_gamma.at(c, ir) - s.y_gamma.at(c, i)) / g.hx;
      e += 0.5 * g.hx * dx * dx;
    }
  BulkField lam = cfg.lambda.at(g, s.time);
  BulkField gf = cfg.g.at(g, s.time);
  for (int j = 0; j < g.ny; ++j) {
    double mu = g.bulk_measure(j);
    for (int i = 0; i < g.nx; ++i) {
      double yv = s.y.at(i, j);
      e += mu * (test::quadrature_yosida_primitive(cfg.pair.bulk_graph, cfg.eps, yv) +
                 lam.at(i, j) * cfg.pair.bulk_pi.primitive(yv) - gf.at(i, j) * yv);
    }
  }
  BoundaryField lam_g = cfg.lambda_gamma.at(g, s.time);
  BoundaryField ggf = cfg.g_gamma.at(g, s.time);
  for (int c = 0; c < 2; ++c)
    for (int i = 0; i < g.nx; ++i) {
      double yv = s.y_gamma.at(c, i);
      e += g.hx * (test::quadrature_yosida_primitive(cfg.pair.boundary_graph,
                                                     cfg.pair.eta * cfg.eps, yv) +
                   lam_g.at(c, i) * cfg.pair.boundary_pi.primitive(yv) - ggf.at(c, i) * yv);
    }

  double reported = run_out.diagnostics.rows.back().energy;
  CHECK(reported == doctest::Approx(e).epsilon(1e-10));
}

TEST_CASE("csv header matches the record field list") {
  CHECK(DiagnosticsTable::csv_header() ==
        "step,time,mass,energy,norm_y_h,norm_y_v,norm_y_dual,norm_ygamma_h,norm_ygamma_v,"
        "norm_w_v,norm_xi_h,norm_xigamma_h,norm_xi_inf,max_abs_y,max_abs_ygamma,"
        "newton_iterations,inc_y_dual,inc_y_h_scaled,inc_ygamma_h");
  DiagnosticsTable t;
  t.rows.push_back({});
  std::ostringstream os;
  t.write_csv(os);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == DiagnosticsTable::csv_header());
}

TEST_CASE("dependence report") {
  RunConfig cfg = base_config();
  cfg.t_final = 0.01;

  SUBCASE("identical runs give zero lhs") {
    RunResult a = run(cfg, 1);
    RunResult b = run(cfg, 1);
    DependenceReport rep = dependence_report(cfg, a, cfg, b);
    CHECK(rep.lhs == 0.0);
    CHECK(rep.rhs_data == 0.0);
    CHECK(rep.ratio == 0.0);
  }

  SUBCASE("source perturbation scales quadratically") {
    RunResult base = run(cfg, 1);
    double prev_lhs = -1.0;
    std::vector<double> lhs_values;
    for (double delta : {0.1, 0.05, 0.025}) {
      RunConfig pert = cfg;
      pert.g.base.push_back(FieldProfile::fourier(delta, 1));
      RunResult p = run(pert, 1);
      DependenceReport rep = dependence_report(cfg, base, pert, p);
      CHECK(rep.lhs > 0.0);
      CHECK(rep.rhs_data > 0.0);
      lhs_values.push_back(rep.lhs);
      prev_lhs = rep.lhs;
    }
    (void)prev_lhs;
    for (size_t k = 0; k + 1 < lhs_values.size(); ++k) {
      double factor = lhs_values[k] / lhs_values[k + 1];
      CHECK(factor > 3.2);
      CHECK(factor < 4.8);
    }
  }

  SUBCASE("unequal means are rejected") {
    RunResult a = run(cfg, 1);
    RunConfig other = cfg;
    other.y0 = {FieldProfile::constant(0.1), FieldProfile::fourier(0.2, 1)};
    RunResult b = run(other, 1);
    CHECK_THROWS_AS(dependence_report(cfg, a, other, b), ConfigMismatchError);
  }

  SUBCASE("mismatched discretizations are rejected") {
    RunResult a = run(cfg, 1);
    RunConfig other = cfg;
    other.eps = 0.2;
    RunResult b = run(other, 1);
    CHECK_THROWS_AS(dependence_report(cfg, a, other, b), ConfigMismatchError);
  }
}

TEST_CASE("separation report") {
  RunConfig cfg = base_config();
  cfg.pair = log_pair();
  cfg.t_final = 5e-3;

  SUBCASE("constant-zero trajectory has unit distance") {
    RunConfig zero = cfg;
    zero.y0 = {FieldProfile::constant(0.0)};
    RunResult r = run(zero, 1);
    SeparationReport rep = separation_report(r.diagnostics, zero.pair.bulk_graph);
    CHECK(rep.delta == doctest::Approx(1.0));
    CHECK(rep.ok);
  }

  SUBCASE("bounded run stays separated") {
    RunResult r = run(cfg, 1);
    SeparationReport rep = separation_report(r.diagnostics, cfg.pair.bulk_graph);
    CHECK(rep.ok);
    CHECK(rep.delta > 0.0);
  }

  SUBCASE("obstacle and polynomial kinds are rejected") {
    RunResult r = run(cfg, 1);
    CHECK_THROWS_AS(separation_report(r.diagnostics, MonotoneGraph::indicator(-1.0, 1.0)),
                    DomainKindMismatchError);
    CHECK_THROWS_AS(separation_report(r.diagnostics, MonotoneGraph::polynomial({0.0, 1.0})),
                    DomainKindMismatchError);
  }
}

TEST_CASE("uniform-in-eps monitors stay within a decade") {
  RunConfig cfg = base_config();
  cfg.pair = log_pair();
  cfg.t_final = 0.01;
  EpsStudyResult study = eps_continuation(cfg, {0.2, 0.1, 0.05});

  auto monitor = [&](const RunResult& r, double eps) {
    double sup_rate_dual = 0.0, sup_v = 0.0, sup_primitive_mass = 0.0;
    for (size_t k = 1; k < r.diagnostics.rows.size(); ++k) {
      sup_rate_dual =
          std::max(sup_rate_dual, r.diagnostics.rows[k].inc_y_dual / r.dt_effective);
      sup_v = std::max(sup_v, r.diagnostics.rows[k].norm_y_v);
    }
    for (const auto& s : r.snapshots) {
      double mass = 0.0;
      for (int j = 0; j < cfg.grid.ny; ++j)
        for (int i = 0; i < cfg.grid.nx; ++i)
          mass += cfg.grid.bulk_measure(j) *
                  yosida_primitive(cfg.pair.bulk_graph, eps, s.y.at(i, j));
      sup_primitive_mass = std::max(sup_primitive_mass, mass);
    }
    return std::array<double, 3>{sup_rate_dual, sup_v, sup_primitive_mass};
  };

  std::vector<std::array<double, 3>> ms;
  for (size_t k = 0; k < study.runs.size(); ++k)
    ms.push_back(monitor(study.runs[k], study.eps_list[k]));
  for (int q = 0; q < 2; ++q) {  // rate and V monitors
    double lo = 1e300, hi = 0.0;
    for (const auto& m : ms) {
      lo = std::min(lo, m[q]);
      hi = std::max(hi, m[q]);
    }
    CHECK(hi / std::max(lo, 1e-300) <= 10.0);
  }
  // primitive masses can vanish identically for small data: bounded above
  for (const auto& m : ms) CHECK(m[2] < 1.0);
}
