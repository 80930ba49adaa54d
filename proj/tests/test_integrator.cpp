#include "doctest.h"

#include <cmath>

#include "pcsf/datagen.hpp"
#include "pcsf/integrator.hpp"
#include "pcsf/verify.hpp"

using namespace pcsf;

namespace {

// Round solution of dk/dt = k^{p+2}/p from k(0) = k0.
double round_exact(double k0, int p, double t) {
  return k0 * std::pow(1.0 - (p + 1.0) / p * std::pow(k0, p + 1) * t, -1.0 / (p + 1));
}

Trajectory analytic_round_trajectory(int p, int count, double t_end_fraction) {
  Trajectory traj;
  traj.params = FlowParams{p, 1, RhsMethod::convolution};
  const double T = p / (p + 1.0);
  for (int i = 0; i < count; ++i) {
    // Points cluster toward T so the tail holds many samples with k >= 10.
    const double frac = 1.0 - std::pow(1.0 - t_end_fraction, static_cast<double>(i) / (count - 1));
    const double t = T * frac;
    traj.samples.push_back(State::constant(traj.params.modes(), round_exact(1.0, p, t), t));
  }
  return traj;
}

}  // namespace

TEST_CASE("single step on constant data follows the mean ODE") {
  const FlowParams params{1, 4, RhsMethod::convolution};
  const IntegratorOptions opts;
  const auto res = step(State::constant(params.modes(), 1.0), params, 1e-4, opts);
  REQUIRE(res.accepted);
  CHECK(std::abs(res.state.mean() - round_exact(1.0, 1, 1e-4)) < 1e-12);
  CHECK(res.error_estimate <= 1.0);
  for (int n = 1; n <= 4; ++n) CHECK(res.state[n] == std::complex<double>(0));
  CHECK(res.state.time_stamp() == doctest::Approx(1e-4));
  CHECK_THROWS_AS(step(State::constant(params.modes(), 1.0), params, 1e-20, opts), DomainError);
}

TEST_CASE("random steps keep the reality condition") {
  const FlowParams params{2, 5, RhsMethod::convolution};
  DormandPrince stepper(make_physical_rhs(params), IntegratorOptions{});
  State s = verify::random_state(params.modes(), 17, 0.1);
  double dt = 1e-5;
  for (int taken = 0; taken < 1000;) {
    auto r = stepper.attempt(s, dt);
    dt = std::min(r.dt_next, 1e-5);
    if (!r.accepted) continue;
    s = std::move(r.state);
    ++taken;
    CHECK(reality_defect(s) <= 1e-12);
  }
}

TEST_CASE("round data blows up at p/(p+1)") {
  for (int p = 1; p <= 3; ++p) {
    const FlowParams params{p, 2, RhsMethod::convolution};
    const auto [traj, est] = integrate_to_blowup(State::constant(params.modes(), 1.0), params, IntegratorOptions{});
    CHECK(std::abs(est.T - p / (p + 1.0)) < 1e-6);
    CHECK(est.T > traj.samples.back().time_stamp());
    CHECK(est.uncertainty >= 0);
    CHECK(traj.samples.back().mean() >= default_blowup_cap(p, 1.0));
    CHECK_NOTHROW(traj.validate());
  }
}

TEST_CASE("round trajectories track the closed form while the mean at most doubles") {
  // The blow-up ODE amplifies earlier errors by (k(t)/k(0))^{p+1}; over this
  // window the amplification is at most 2^{p+1}.
  for (int p = 1; p <= 3; ++p) {
    const FlowParams params{p, 1, RhsMethod::convolution};
    IntegratorOptions opts;
    IntegrationRequest req;
    req.rhs = make_physical_rhs(params);
    req.stop = [](const State& s) { return s.mean() >= 2.0; };
    const double psi0 = 1.3;
    const auto out = integrate(State::constant(params.modes(), psi0), opts, req);
    double worst = 0;
    for (const auto& s : out.samples) {
      const double exact = round_exact(psi0, p, s.time_stamp());
      worst = std::max(worst, std::abs(s.mean() - exact) / exact);
    }
    CHECK(worst <= 10 * opts.rel_tol);
  }
}

TEST_CASE("perturbed round data") {
  const FlowParams params{1, 16, RhsMethod::convolution};
  const State psi = curvature_from_support(perturbed_round_spec(0.05), params.modes());
  const auto [traj, est] = integrate_to_blowup(psi, params, IntegratorOptions{});
  const double naive = 0.5 * std::pow(psi.mean(), -2);
  CHECK(std::abs(est.T - naive) / naive < 0.05);
  CHECK(est.fit_residual <= 1e-4);
  // mean is nondecreasing in the delta-small regime
  for (std::size_t i = 1; i < traj.samples.size(); ++i) CHECK(traj.samples[i].mean() >= traj.samples[i - 1].mean());
}

TEST_CASE("estimate_T on analytically sampled round trajectories") {
  for (int p = 1; p <= 3; ++p) {
    const auto traj = analytic_round_trajectory(p, 200, 1 - 1e-6);
    const auto est = estimate_T(traj, traj.params);
    CHECK(std::abs(est.T - p / (p + 1.0)) < 1e-10);
  }
  auto short_tail = analytic_round_trajectory(1, 200, 1 - 1e-6);
  // keep only 5 samples with k >= 10
  std::vector<State> kept;
  int tail = 0;
  for (const auto& s : short_tail.samples) {
    if (s.mean() >= 10 && ++tail > 5) break;
    kept.push_back(s);
  }
  short_tail.samples = kept;
  CHECK_THROWS_AS(estimate_T(short_tail, short_tail.params), FitError);

  auto wiggle = analytic_round_trajectory(1, 200, 1 - 1e-6);
  wiggle.samples[190][0] *= 1.5;  // non-monotone tail
  CHECK_THROWS_AS(estimate_T(wiggle, wiggle.params), FitError);
}

TEST_CASE("integrator failure modes") {
  const FlowParams params{1, 4, RhsMethod::convolution};
  IntegratorOptions few;
  few.max_steps = 10;
  CHECK_THROWS_AS(integrate_to_blowup(State::constant(params.modes(), 1.0), params, few), MaxStepsError);

  State bent = State::constant(params.modes(), 1.0);
  bent.set_real_pair(1, 0.75);  // 1 + 1.5 cos theta
  CHECK_THROWS_AS(check_positive(bent, 1), PositivityError);
  CHECK_THROWS_AS(integrate_to_blowup(bent, params, IntegratorOptions{}), PositivityError);

  IntegratorOptions bad;
  bad.rel_tol = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = IntegratorOptions{};
  bad.dt_min = 1.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("trajectory invariants") {
  Trajectory t;
  t.params = FlowParams{1, 1};
  t.samples.push_back(State::constant(make_mode_set(1), 1.0, 0.0));
  t.samples.push_back(State::constant(make_mode_set(1), 1.0, 0.0));
  CHECK_THROWS_AS(t.validate(), DomainError);
  t.samples.back().set_time_stamp(0.1);
  CHECK_NOTHROW(t.validate());
  t.samples.push_back(State::constant(make_mode_set(2), 1.0, 0.2));
  CHECK_THROWS_AS(t.validate(), DomainError);
}

TEST_CASE("default cap gives six decades of T - t") {
  CHECK(default_blowup_cap(1, 1.0) == doctest::Approx(1e3));
  CHECK(default_blowup_cap(2, 2.0) == doctest::Approx(200.0));
}
