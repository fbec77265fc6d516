#include <cmath>
#include <vector>

#include "blowup/diagnostics.hpp"
#include "blowup/presets.hpp"
#include "doctest.h"

using namespace blowup;

namespace {

// Exact power law sup(t) = (T - t)^{-1/(p-1)} sampled on a geometric approach
// to T, so the top decade holds many points.
std::vector<Monitor> power_law(double p, double t_blow, int count) {
  std::vector<Monitor> out;
  for (int k = 0; k < count; ++k) {
    Monitor m;
    const double gap = t_blow * std::pow(10.0, -0.05 * k);
    m.t = t_blow - gap;
    m.sup_norm = std::pow(gap, -1.0 / (p - 1.0));
    out.push_back(m);
  }
  return out;
}

GridFunction nodes(std::initializer_list<double> v) {
  GridFunction u(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) u[i++] = x;
  return u;
}

}  // namespace

TEST_CASE("blow-up time bounds for a single node") {
  const Grid g = build_grid(1);
  const ProblemSpec s = make_problem(3.0, 1.3, GridFunction::Ones(3),
                                     nodes({0, 2, 0}), g);
  const TimeBounds tb = blowup_time_bounds(s, g);
  CHECK(tb.lower == 0.125);

  // Independent evaluation: c = (2/4)^{1.3/2}, beta = 3 - 1.3 * 2 = 0.4,
  // ||U0||_4 = ||U0||_2 = 2 when h = 1.
  const double c = std::pow(0.5, 0.65);
  const double k = 0.5 - c * std::pow(2.0, -0.4);
  CHECK(tb.k == doctest::Approx(k).epsilon(1e-13));
  CHECK(k == doctest::Approx(0.0170).epsilon(1e-2));
  REQUIRE(tb.upper.has_value());
  CHECK(*tb.upper == doctest::Approx(1.0 / (2.0 * k * 4.0)).epsilon(1e-13));
  CHECK(*tb.upper == doctest::Approx(7.35).epsilon(2e-3));
}

TEST_CASE("bounds omit the upper value when k is not positive") {
  const Grid g = build_grid(1);
  const ProblemSpec small = make_problem(3.0, 1.3, GridFunction::Ones(3),
                                         nodes({0, 0.5, 0}), g);
  const TimeBounds tb = blowup_time_bounds(small, g);
  CHECK(tb.k <= 0.0);
  CHECK_FALSE(tb.upper.has_value());
  CHECK_FALSE(tb.upper_missing_reason.empty());

  const ProblemSpec super = make_problem(3.0, 1.8, GridFunction::Ones(3),
                                         nodes({0, 5, 0}), g);
  CHECK_FALSE(blowup_time_bounds(super, g).upper.has_value());

  const ProblemSpec zero = make_problem(3.0, 1.3, GridFunction::Ones(3),
                                        GridFunction::Zero(3), g);
  CHECK_THROWS_AS(blowup_time_bounds(zero, g), std::invalid_argument);
}

TEST_CASE("synthetic power laws are recovered exactly") {
  for (double p : {2.0, 3.0, 5.0}) {
    CAPTURE(p);
    const auto mon = power_law(p, 1.0, 120);
    const double t_est = estimate_blowup_time(mon, p);
    CHECK(std::abs(t_est - 1.0) <= 1e-6);
    const double slope = fit_rate_exponent(mon, t_est);
    CHECK(std::abs(slope + 1.0 / (p - 1.0)) <= 1e-6);
    // With the exact T as input the fit is exact as well.
    CHECK(std::abs(fit_rate_exponent(mon, 1.0) + 1.0 / (p - 1.0)) <= 1e-9);
  }
}

TEST_CASE("fit window is the top decade of the sup-norm") {
  const auto mon = power_law(3.0, 1.0, 120);
  const auto w = fit_window(mon);
  REQUIRE_FALSE(w.empty());
  CHECK(w.back().t == mon.back().t);
  for (const Monitor& m : w) CHECK(m.sup_norm >= 0.1 * mon.back().sup_norm);
  const std::size_t before = mon.size() - w.size() - 1;
  CHECK(mon[before].sup_norm < 0.1 * mon.back().sup_norm);
}

TEST_CASE("estimate is stable under subsampling the monitors") {
  const Grid g = build_grid(101);
  const ProblemSpec s = sample(family_of(find_preset("fig5")), g);
  const Trajectory tr = integrate(s, g, IntegratorConfig{});
  REQUIRE(tr.status.kind == StopKind::BlewUp);
  std::vector<Monitor> half;
  for (std::size_t i = tr.monitors.size() % 2 == 0 ? 1 : 0;
       i < tr.monitors.size(); i += 2) {
    half.push_back(tr.monitors[i]);
  }
  REQUIRE(half.back().t == tr.monitors.back().t);
  const double full = estimate_blowup_time(tr.monitors, s.p);
  const double sub = estimate_blowup_time(half, s.p);
  CHECK(std::abs(full - sub) <= 1e-3 * full);
}

TEST_CASE("fits reject series without a blow-up trend") {
  std::vector<Monitor> flat(40);
  for (std::size_t i = 0; i < flat.size(); ++i) {
    flat[i].t = 0.01 * static_cast<double>(i);
    flat[i].sup_norm = 5.0;
  }
  CHECK_THROWS_AS(estimate_blowup_time(flat, 3.0), NoBlowupTrend);

  const auto short_series = power_law(3.0, 1.0, 120);
  const std::vector<Monitor> tail(short_series.end() - 9, short_series.end());
  CHECK_THROWS_AS(estimate_blowup_time(tail, 3.0), NoBlowupTrend);
  CHECK_THROWS_AS(fit_rate_exponent(tail, 1.0), NoBlowupTrend);
}

TEST_CASE("blowup_point") {
  const Grid g1 = build_grid(1);
  GridFunction u0(3);
  u0 << 0, 2, 0;
  const ProblemSpec scalar = make_problem(3.0, 1.5, GridFunction::Zero(3), u0, g1);
  IntegratorConfig cfg;
  cfg.blowup_threshold = 1e6;
  const Trajectory tr = integrate(scalar, g1, cfg);
  const BlowupPoint bp = blowup_point(tr, g1);
  CHECK(bp.node == 1);
  CHECK(bp.x == 0.0);
  CHECK_FALSE(bp.tie);

  Trajectory not_blown = tr;
  not_blown.status.kind = StopKind::ReachedHorizon;
  CHECK_THROWS_AS(blowup_point(not_blown, g1), InvalidState);

  // Even N on symmetric data has two central maxima.
  const Grid g = build_grid(4);
  Trajectory sym;
  sym.status.kind = StopKind::BlewUp;
  sym.final_state = nodes({0, 1, 5, 5, 1, 0});
  const BlowupPoint tie = blowup_point(sym, g);
  CHECK(tie.node == 2);
  CHECK(tie.tie);
}

TEST_CASE("blowup_point reflects with reflected data") {
  const Grid g = build_grid(41);
  const Preset& pre = find_preset("fig2");
  ProblemSpec s = sample(family_of(pre), g);
  ProblemSpec r = make_problem(s.p, s.q, s.b.reverse(), s.u0.reverse(), g);
  const Trajectory a = integrate(s, g, IntegratorConfig{});
  const Trajectory b = integrate(r, g, IntegratorConfig{});
  REQUIRE(a.status.kind == StopKind::BlewUp);
  REQUIRE(b.status.kind == StopKind::BlewUp);
  CHECK(blowup_point(a, g).node + blowup_point(b, g).node == g.size() - 1);
}

TEST_CASE("analyze collects the report") {
  const Grid g = build_grid(51);
  const ProblemSpec s = sample(family_of(find_preset("fig5")), g);
  const Trajectory tr = integrate(s, g, IntegratorConfig{});
  const BlowupReport rep = analyze(tr, s, g);
  CHECK(rep.status.kind == StopKind::BlewUp);
  REQUIRE(rep.t_est.has_value());
  CHECK(*rep.t_est >= rep.t_stop);
  CHECK(rep.bounds.lower <= *rep.t_est);
  REQUIRE(rep.rate_exponent.has_value());
  CHECK(rep.rate_expected == -0.5);
  REQUIRE(rep.point.has_value());
  CHECK(rep.point->x == 0.0);
}

TEST_CASE("cubic interpolation is exact on cubics") {
  const Grid g = build_grid(9);
  GridFunction u(g.size());
  auto f = [](double x) { return 1.0 - 2.0 * x + 0.5 * x * x + 3.0 * x * x * x; };
  for (Eigen::Index j = 0; j < g.size(); ++j) u[j] = f(g.x(j));
  for (double x : {-1.0, -0.93, -0.41, 0.0, 0.137, 0.5, 0.99, 1.0}) {
    CHECK(interpolate_cubic(u, g, x) == doctest::Approx(f(x)).epsilon(1e-12));
  }
}

TEST_CASE("convergence study on smooth data is second order") {
  const ProblemFamily fam = family_of(find_preset("smooth"));
  IntegratorConfig cfg;
  cfg.rel_tol = 1e-11;
  cfg.abs_tol = 1e-13;
  const std::vector<Eigen::Index> n_list{25, 50, 100};
  const ConvergenceReport rep = convergence_study(fam, n_list, 0.05, cfg);
  CHECK(rep.reference_n == 403);
  CHECK_FALSE(rep.partial);
  REQUIRE(rep.orders.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(rep.order_defined[i]);
    CHECK(rep.orders[i] >= 1.8);
  }
  for (double e : rep.errors) CHECK(e > 0.0);
}

TEST_CASE("convergence study flags degenerate requests") {
  const ProblemFamily fam = family_of(find_preset("smooth"));
  IntegratorConfig cfg;
  const std::vector<Eigen::Index> repeated{20, 20, 40};
  const ConvergenceReport rep = convergence_study(fam, repeated, 0.02, cfg);
  CHECK_FALSE(rep.order_defined[0]);
  CHECK(std::isnan(rep.orders[0]));
  CHECK(rep.order_defined[1]);
  CHECK_FALSE(rep.flags.empty());

  const std::vector<Eigen::Index> two{20, 40};
  CHECK_THROWS_AS(convergence_study(fam, two, 0.02, cfg), std::invalid_argument);
  CHECK_THROWS_AS(convergence_study(fam, repeated, 0.0, cfg),
                  std::invalid_argument);

  // fig5 data blows up long before t = 0.01.
  const ProblemFamily blow = family_of(find_preset("fig5"));
  const std::vector<Eigen::Index> small{10, 20, 40};
  const ConvergenceReport part = convergence_study(blow, small, 0.01, cfg);
  CHECK(part.partial);
  CHECK_FALSE(part.flags.empty());
  for (double e : part.errors) CHECK(std::isnan(e));
}
