#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "helpers.hpp"
#include "lplab/dynamics.hpp"
#include "lplab/error.hpp"
#include "lplab/nonlinear.hpp"
#include "lplab/random_field.hpp"
#include "lplab/spectral.hpp"

using namespace lplab;
using testing::max_abs;
using testing::max_abs_diff;
using testing::sample;

namespace {

constexpr double kPi = std::numbers::pi;

SimulationParams short_run(double t_end, double dt = 1e-3) {
  SimulationParams p;
  p.t_end = t_end;
  p.dt = dt;
  return p;
}

// u = (sin 2z, 0, 0): (u.grad)u = 0, so u(t) = exp(-4 nu t) u0.
VectorField shear(const Grid& g, double t, double nu) {
  const double decay = std::exp(-4.0 * nu * t);
  return sample(g, 3, [decay](int c, double, double, double z) { return c == 0 ? decay * std::sin(2 * z) : 0.0; });
}

}  // namespace

TEST_CASE("Taylor-Green initial data") {
  const Grid g(3, 16);
  const auto tg = taylor_green(g);
  const auto direct = sample(g, 3, [](int c, double x, double y, double z) {
    if (c == 0) return std::sin(x) * std::cos(y) * std::cos(z);
    if (c == 1) return -std::cos(x) * std::sin(y) * std::cos(z);
    return 0.0;
  });
  CHECK(max_abs_diff(tg, direct) < 1e-14);
  const double e = sobolev_norm(tg, 0.0);
  CHECK(e * e == doctest::Approx(2.0 * kPi * kPi * kPi).epsilon(1e-13));
  CHECK(divergence_ratio(tg) < 1e-15);
  const Grid g2(2, 16);
  const auto tg2 = sample(g2, 2, [](int c, double x, double y, double) {
    return c == 0 ? std::sin(x) * std::cos(y) : -std::cos(x) * std::sin(y);
  });
  CHECK(max_abs_diff(taylor_green(g2), tg2) < 1e-14);
}

TEST_CASE("Stokes mode decays exactly") {
  const Grid g(3, 16);
  const double nu = 0.7;
  auto p = short_run(0.1);
  p.nu = nu;
  const auto traj = ns_simulate(shear(g, 0.0, nu), p);
  REQUIRE_FALSE(traj.aborted);
  REQUIRE(traj.steps == 100);
  const auto& last = traj.checkpoints.back();
  CHECK(traj.records[last.record].t == doctest::Approx(0.1));
  CHECK(max_abs_diff(last.u, shear(g, 0.1, nu)) < 1e-8);
  CHECK(energy_balance(traj).max_residual < 1e-8);
  SUBCASE("pre-Young inequality holds trivially") {
    const auto h = check_h32_inequality(traj, 1e-8);
    CHECK(h.pre_young.violations == 0);
    CHECK(h.young.violations == 0);
  }
}

TEST_CASE("Taylor-Green run invariants") {
  const Grid g(3, 16);
  const auto traj = ns_simulate(taylor_green(g), short_run(0.05));
  REQUIRE_FALSE(traj.aborted);
  REQUIRE(traj.records.size() == 51);
  for (std::size_t i = 0; i < traj.records.size(); ++i) {
    const auto& r = traj.records[i];
    CHECK(r.divergence <= 1e-10);
    // Interpolation between L2 and the top Sobolev index.
    CHECK(r.h_mid <= std::pow(r.l2, 0.4) * std::pow(r.h_top, 0.6) * (1.0 + 1e-10));
    if (i > 0) {
      CHECK(r.t > traj.records[i - 1].t);
      CHECK(r.l2 <= traj.records[i - 1].l2 * (1.0 + 1e-8));
    }
  }
  CHECK(energy_balance(traj).max_residual < 1e-4);
}

TEST_CASE("energy residual shrinks under step refinement") {
  const Grid g(3, 16);
  const auto coarse = energy_balance(ns_simulate(taylor_green(g), short_run(0.04, 2e-3)));
  const auto fine = energy_balance(ns_simulate(taylor_green(g), short_run(0.04, 1e-3)));
  CHECK(coarse.max_residual >= 2.0 * fine.max_residual);
}

TEST_CASE("overdamped run has decreasing Sobolev norms") {
  const Grid g(3, 16);
  const auto u0 = random_solenoidal(g, {3.0, 1, 5, 1.0}, 11);
  const auto traj = ns_simulate(u0, short_run(0.05));
  REQUIRE_FALSE(traj.aborted);
  for (std::size_t i = 1; i < traj.records.size(); ++i) {
    const auto& a = traj.records[i - 1];
    const auto& b = traj.records[i];
    CHECK(b.l2 < a.l2);
    CHECK(b.h1 < a.h1);
    CHECK(b.h_mid < a.h_mid);
    CHECK(b.h_top < a.h_top);
  }
}

TEST_CASE("simulation preconditions and aborts") {
  const Grid g(3, 16);
  SUBCASE("undealiased data") {
    const auto u = sample(g, 3, [](int c, double, double, double z) { return c == 0 ? std::sin(7 * z) : 0.0; });
    CHECK_THROWS_AS(ns_simulate(u, short_run(0.01)), DomainError);
  }
  SUBCASE("nonzero mean") {
    const auto u = sample(g, 3, [](int c, double, double, double z) { return c == 0 ? 1.0 + std::sin(z) : 0.0; });
    CHECK_THROWS_AS(ns_simulate(u, short_run(0.01)), DomainError);
  }
  SUBCASE("divergent data") {
    const auto u = sample(g, 3, [](int c, double x, double, double) { return c == 0 ? std::sin(x) : 0.0; });
    CHECK_THROWS_AS(ns_simulate(u, short_run(0.01)), PreconditionError);
  }
  SUBCASE("bad parameters") {
    auto p = short_run(0.01);
    p.nu = 0.0;
    CHECK_THROWS_AS(ns_simulate(taylor_green(g), p), DomainError);
    p = short_run(0.01, 0.1);
    CHECK_THROWS_AS(ns_simulate(taylor_green(g), p), DomainError);
  }
  SUBCASE("CFL violation keeps the partial trajectory") {
    const auto traj = ns_simulate(100.0 * taylor_green(g), short_run(0.1, 1e-2));
    CHECK(traj.aborted);
    CHECK(traj.abort_reason.find("CFL") != std::string::npos);
    CHECK(traj.records.size() == 1);
    CHECK(traj.steps == 0);
  }
}

TEST_CASE("H^{n/2} differential inequality") {
  const Grid g(3, 16);
  const auto traj = ns_simulate(taylor_green(g), short_run(0.05));
  // Independent constant: largest pairing ratio at the stored fields.
  double ratio = 0.0;
  for (const auto& cp : traj.checkpoints) {
    const auto s = trilinear_pairing(cp.u, 1.5);
    if (s.rhs > 0.0) ratio = std::max(ratio, s.lhs / s.rhs);
  }
  REQUIRE(ratio > 0.0);
  const auto ok = check_h32_inequality(traj, 4.0 * ratio);
  CHECK(ok.pre_young.violations == 0);
  CHECK(ok.pre_young.max_excess < 0.0);
  CHECK(ok.pre_young.t.size() == traj.records.size() - 4);
  // Negative control: an undersized constant is caught.
  const auto bad = check_h32_inequality(traj, 0.05 * ratio);
  CHECK(bad.pre_young.violations > 0);
  SUBCASE("domain errors") {
    CHECK_THROWS_AS(check_h32_inequality(traj, 0.0), DomainError);
    auto tiny = traj;
    tiny.records.resize(4);
    CHECK_THROWS_AS(check_h32_inequality(tiny, 1.0), DomainError);
    CHECK_THROWS_AS(energy_balance(tiny), DomainError);
  }
}

TEST_CASE("Besov block evolution") {
  const Grid g(3, 16);
  SUBCASE("Taylor-Green, early time") {
    auto p = short_run(0.05);
    p.field_every = 5;
    const auto traj = ns_simulate(taylor_green(g), p);
    const auto check = check_besov_block_evolution(traj, 1.0);
    CHECK(check.d_sum_error < 1e-10);
    int points = 0;
    for (const auto& s : check.per_block) {
      points += static_cast<int>(s.t.size());
      CHECK(s.violations == 0);
      CHECK(s.max_excess <= 0.0);
    }
    CHECK(points > 0);
    CHECK(check.summed.violations == 0);
  }
  SUBCASE("summed form catches an undersized constant") {
    auto p = short_run(0.05);
    p.nu = 0.01;
    const auto traj = ns_simulate(taylor_green(g), p);
    CHECK(check_besov_block_evolution(traj, 1.0).summed.violations == 0);
    CHECK(check_besov_block_evolution(traj, 1e-6).summed.violations > 0);
  }
  SUBCASE("zero velocity") {
    const auto traj = ns_simulate(VectorField::zeros(g, 3), short_run(0.01));
    const auto check = check_besov_block_evolution(traj, 1.0);
    CHECK(check.violations() == 0);
    for (const auto& s : check.per_block) {
      for (std::size_t i = 0; i < s.t.size(); ++i) {
        CHECK(s.lhs[i] == 0.0);
        CHECK(s.rhs[i] == 0.0);
      }
    }
  }
}

TEST_CASE("ODE comparison lemma") {
  OdeParams p;  // c = 1, gamma = 2, X0 = 1: X(t) = (1 - 2t)^{-1/2}
  CHECK(p.blowup_time() == 0.5);
  CHECK(ode_lower_bound(p, 0.0) == doctest::Approx(1.0));
  CHECK(ode_lower_bound(p, 0.375) == doctest::Approx(2.0));
  CHECK(ode_lower_bound(p, 0.49) < ode_lower_bound(p, 0.499));
  CHECK_THROWS_AS(ode_lower_bound(p, 0.5), DomainError);
  CHECK_THROWS_AS(ode_lower_bound(p, -0.1), DomainError);

  const auto s = ode_integrate(p, 1e-3);
  CHECK(std::abs(s.t_num - 0.5) <= 0.005 * 0.5);
  CHECK(s.bound_holds);
  CHECK(s.min_ratio >= 1.0 - 1e-9);
  CHECK(s.max_ratio <= 1.0 + 1e-3);
  CHECK(s.x.back() > 1e6);
  // Away from the singularity the solution is well conditioned in t.
  for (std::size_t i = 0; i < s.t.size() && s.x[i] < 100.0; i += 7) {
    CHECK(s.x[i] == doctest::Approx(1.0 / std::sqrt(1.0 - 2.0 * s.t[i])).epsilon(1e-5));
  }

  OdeParams faster = p;
  faster.c = 2.0;
  CHECK(ode_integrate(faster, 1e-3).t_num < s.t_num);

  OdeParams linear;
  linear.gamma = 1.0;
  CHECK(ode_bound_formula(1.0) == "X(t) >= c^-1 (T-t)^-1");
  CHECK(ode_integrate(linear, 1e-3).t_num == doctest::Approx(1.0).epsilon(1e-6));
  CHECK_THROWS_AS(ode_integrate(p, 0.0), DomainError);
  OdeParams bad;
  bad.gamma = -1.0;
  CHECK_THROWS_AS(ode_integrate(bad, 1e-3), DomainError);
}

TEST_CASE("weak blowup scenario") {
  ScenarioParams p;  // eps = 0.1, c = 1, T = 1, tau = 0
  const auto r = weak_blowup_scenario(p);
  CHECK(r.t.back() == doctest::Approx(1.0 - 1e-6).epsilon(1e-12));
  CHECK(r.z_nonincreasing);
  CHECK(r.max_z_increase <= 1e-10);
  CHECK(r.expected_exponent == doctest::Approx(0.2));
  CHECK(r.exponent_error <= 0.02);
  CHECK(r.y_below_majorant);
  // Y = A s^-a - B s^-1 with s = T - t, B = 2 eps^2 / (1 - a), A = Y0 + B.
  const double a = 0.2;
  const double B = 0.02 / (1.0 - a);
  const double A = 1.0 + B;
  for (std::size_t i = 0; i < r.t.size(); i += 101) {
    const double s = 1.0 - r.t[i];
    const double exact = A * std::pow(s, -a) - B / s;
    CHECK(std::abs(r.y[i] - exact) <= 1e-8 * (A * std::pow(s, -a) + B / s));
  }
  // Starting on the strong lower bound, Y drops below it immediately.
  CHECK(r.crossing_time == doctest::Approx(r.t[1]));
  CHECK(r.majorant_crossing == 0.0);
  CHECK(r.tk_note.find("T - t_k") != std::string::npos);

  SUBCASE("later crossing from a larger start") {
    ScenarioParams q = p;
    q.y0 = 10.0;
    const auto s = weak_blowup_scenario(q);
    // 10 s^-0.2 = s^-1 at s = 10^-1.25.
    CHECK(s.majorant_crossing == doctest::Approx(1.0 - std::pow(10.0, -1.25)).epsilon(1e-12));
    CHECK(s.crossing_time > 0.9);
  }
  SUBCASE("preconditions") {
    ScenarioParams q = p;
    q.epsilon = 0.5;  // 2 c eps = 1
    CHECK_THROWS_AS(weak_blowup_scenario(q), DomainError);
    q = p;
    q.tau = 1.0;
    CHECK_THROWS_AS(weak_blowup_scenario(q), DomainError);
    q = p;
    q.dt = 0.0;
    CHECK_THROWS_AS(weak_blowup_scenario(q), DomainError);
  }
}
