#include "doctest.h"

#include <cmath>
#include <random>

#include "pcsf/integrator.hpp"
#include "pcsf/rates.hpp"

using namespace pcsf;

TEST_CASE("predicted rates") {
  const auto r1 = predicted_rates(1);
  CHECK(r1.convergence_rate == 2);
  CHECK(r1.mode_decay == doctest::Approx(0.5));
  CHECK(r1.blowup_exponent == doctest::Approx(0.5));
  CHECK(r1.mean_offset_rate == 4);
  CHECK(r1.alpha_n(2) == doctest::Approx(0.5));
  const auto r2 = predicted_rates(2);
  CHECK(r2.convergence_rate == 5);
  CHECK(r2.mode_decay == doctest::Approx(4.0 / 3));
  CHECK(r2.blowup_exponent == doctest::Approx(1.0 / 3));
  CHECK(alpha(2, 3) == doctest::Approx(7.0 / 4));
  for (int p = 1; p <= 10; ++p) {
    const auto r = predicted_rates(p);
    CHECK(r.alpha_n(2) == doctest::Approx(r.mode_decay).epsilon(1e-15));
    CHECK(r.mode_decay > 0);
    CHECK(r.convergence_rate > 0);
    CHECK(r.blowup_exponent > 0);
    CHECK(r.mean_offset_rate > 0);
  }
  CHECK_THROWS_AS(predicted_rates(0), DomainError);
}

TEST_CASE("power-law fits") {
  const double T = 0.8;
  std::vector<SamplePoint> exact, noisy;
  std::mt19937_64 rng(12);
  std::normal_distribution<double> noise(0.0, 0.01);
  for (int i = 0; i < 60; ++i) {
    const double gap = T * std::pow(10.0, -3.0 * i / 59);  // three decades
    const double y = 3 * std::pow(gap, 0.7);
    exact.emplace_back(T - gap, y);
    noisy.emplace_back(T - gap, y * (1 + noise(rng)));
  }
  const auto f = fit_power_law(exact, T);
  CHECK(f.exponent == doctest::Approx(0.7).epsilon(1e-10));
  CHECK(f.amplitude == doctest::Approx(3.0).epsilon(1e-10));
  CHECK(f.rms_residual <= 1e-12);
  CHECK(std::abs(fit_power_law(noisy, T).exponent - 0.7) <= 0.02);

  CHECK_THROWS_AS(fit_power_law(std::span(exact).first(7), T), FitError);
  auto negative = exact;
  negative[3].second = -1;
  CHECK_THROWS_AS(fit_power_law(negative, T), FitError);
  std::vector<SamplePoint> narrow;
  for (int i = 0; i < 10; ++i) narrow.emplace_back(0.1 + 0.01 * i, 1.0 + i);
  CHECK_THROWS_AS(fit_power_law(narrow, T), FitError);
}

TEST_CASE("exponential fits") {
  std::vector<SamplePoint> exact, flat;
  for (int i = 0; i < 20; ++i) {
    const double tau = 0.25 * i;
    exact.emplace_back(tau, 5 * std::exp(-2 * tau));
    flat.emplace_back(tau, 0.3);
  }
  const auto f = fit_exponential(exact);
  CHECK(f.rate == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(f.amplitude == doctest::Approx(5.0).epsilon(1e-10));
  CHECK(std::abs(fit_exponential(flat).rate) < 1e-12);
  CHECK_THROWS_AS(fit_exponential(std::span(exact).first(5)), FitError);
}

TEST_CASE("trapping condition") {
  const ModeSet z = make_mode_set(3);
  CHECK(check_trapping(State::constant(z, 1.0), 1e6).pass);

  State s = State::constant(z, 1.0);
  s.set_real_pair(2, 0.05);  // 1 + 0.1 cos 2 theta
  const auto t = check_trapping(s, 4.0);
  CHECK(t.pass);
  CHECK(t.margin == doctest::Approx(0.2));

  State big = State::constant(z, 1.0);
  big.set_real_pair(2, 0.5);
  CHECK_FALSE(check_trapping(big, 4.0).pass);

  for (double lambda : {0.01, 3.0, 1e4}) {
    State a = s, b = big;
    a.coeffs() *= lambda;
    b.coeffs() *= lambda;
    CHECK(check_trapping(a, 4.0).pass);
    CHECK_FALSE(check_trapping(b, 4.0).pass);
  }
}

TEST_CASE("delta smallness") {
  const ModeSet z = make_mode_set(3);
  CHECK(check_delta_smallness(State::constant(z, 2.0), 0.01).pass);

  State s = State::constant(z, 1.0);
  s.set_real_pair(2, 0.01);
  const auto c = check_delta_smallness(s, 0.1);
  CHECK(c.pass);
  CHECK(c.worst_mode == 2);
  CHECK(c.worst_ratio == doctest::Approx(0.04));

  State t = State::constant(z, 1.0);
  t.set_real_pair(3, 0.05);
  const auto f = check_delta_smallness(t, 0.1);
  CHECK_FALSE(f.pass);
  CHECK(f.worst_ratio == doctest::Approx(0.45));

  // modulus governs: |0.03 + 0.03i| * 4 = 0.1697 > 0.15 although each part gives 0.12
  State m = State::constant(z, 1.0);
  m.set_real_pair(2, {0.03, 0.03});
  const auto mc = check_delta_smallness(m, 0.15);
  CHECK_FALSE(mc.pass);
  CHECK(mc.worst_ratio_componentwise == doctest::Approx(0.12));

  for (double d = 0.01; d < 1; d += 0.01) {
    if (check_delta_smallness(s, d).pass) CHECK(check_delta_smallness(s, d + 0.05).pass);
  }
}

TEST_CASE("report decisions") {
  RateReport eq{"x", 1.04, 1.0};
  eq.tolerance = 0.05;
  eq.decide();
  CHECK(eq.pass);
  eq.fitted = 0.94;
  eq.decide();
  CHECK_FALSE(eq.pass);

  RateReport lb{"y", 3.0, 1.0};
  lb.kind = RateKind::lower_bound;
  lb.tolerance = 0.1;
  lb.decide();
  CHECK(lb.pass);
  lb.fitted = 0.85;
  lb.decide();
  CHECK_FALSE(lb.pass);
}

TEST_CASE("mode reports on round data only carry the blow-up fit") {
  const FlowParams params{1, 4};
  const auto [traj, est] = integrate_to_blowup(State::constant(params.modes(), 1.0), params, IntegratorOptions{});
  const auto reports = mode_decay_report(traj, est.T, params);
  REQUIRE(reports.size() == 1);
  CHECK(reports[0].quantity == "blowup");
  CHECK(reports[0].fitted == doctest::Approx(-0.5).epsilon(1e-4));
  CHECK(reports[0].pass);
  CHECK(tail_window(100) == std::pair<std::size_t, std::size_t>{20, 99});
}
