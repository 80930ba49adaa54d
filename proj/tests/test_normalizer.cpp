#include "doctest.h"

#include <cmath>
#include <random>

#include "pcsf/datagen.hpp"
#include "pcsf/normalizer.hpp"
#include "pcsf/rates.hpp"

using namespace pcsf;

TEST_CASE("round solution normalizes to one") {
  for (int p = 1; p <= 3; ++p) {
    const FlowParams params{p, 2};
    const double T = p / (p + 1.0);
    for (double t : {0.0, 0.1, 0.3, 0.49, T * (1 - 1e-5)}) {
      const double k = std::pow(1 - t / T, -1.0 / (p + 1));
      const auto n = normalize(State::constant(params.modes(), k, t), T, params);
      CHECK(n.state.mean() == doctest::Approx(1.0).epsilon(1e-10));
      CHECK(n.state.time_stamp() == n.tau);
    }
    CHECK_THROWS_AS(normalize(State::constant(params.modes(), 1.0, T), T, params), DomainError);
  }
}

TEST_CASE("tau_of_t and t_of_tau") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int p = 1; p <= 3; ++p) {
    const double T = 0.37 * p;
    CHECK(tau_of_t(0, T, p) == 0.0);
    CHECK(tau_of_t(T * (1 - std::exp(-(p + 1.0))), T, p) == doctest::Approx(1.0).epsilon(1e-14));
    for (int i = 0; i < 100; ++i) {
      const double t = u(rng) * T;
      const double tau = tau_of_t(t, T, p);
      CHECK(std::abs(t_of_tau(tau, T, p) - t) <= 1e-14 * std::max(t, 1e-300) + 1e-300);
      CHECK(std::exp(-tau) == doctest::Approx(std::pow((T - t) / T, 1.0 / (p + 1))).epsilon(1e-14));
    }
    CHECK_THROWS_AS(tau_of_t(T, T, p), DomainError);
    CHECK_THROWS_AS(tau_of_t(-0.1, T, p), DomainError);
    CHECK_THROWS_AS(t_of_tau(-1.0, T, p), DomainError);
  }
}

TEST_CASE("normalized right side at and near the fixed point") {
  for (int p = 1; p <= 3; ++p) {
    const FlowParams params{p, 4};
    CHECK(rhs_normalized(State::constant(params.modes(), 1.0), params).max_modulus() < 1e-14);
    for (int n = 1; n <= 3; ++n) {
      const double eps = 1e-5;
      State s = State::constant(params.modes(), 1.0);
      s.set_real_pair(n, eps / 2);  // 1 + eps cos(n theta)
      const double lambda = -static_cast<double>(p) * n * n + p + 1;
      CHECK(std::abs(rhs_normalized(s, params)[n].real() - lambda * eps / 2) < 100 * eps * eps);
    }
  }
  State neg = State::constant(make_mode_set(4), 0.5);
  neg.set_real_pair(1, 0.5);
  CHECK_THROWS_AS(rhs_normalized(neg, FlowParams{1, 4}), PositivityError);
}

TEST_CASE("normalized integration") {
  const FlowParams params{2, 8};
  const auto flat = integrate_normalized(NormalizedState{State::constant(params.modes(), 1.0), 0}, params,
                                         IntegratorOptions{}, 1.0);
  CHECK(flat.domain == TimeDomain::normalized_tau);
  for (const auto& s : flat.samples) CHECK(std::abs(s.mean() - 1) < 1e-13);

  // Distance to the circle decreases after tau = 1 for support data.
  const FlowParams p1{1, 16};
  const State psi = curvature_from_support(perturbed_round_spec(0.05), p1.modes());
  const auto [physical, est] = integrate_to_blowup(psi, p1, IntegratorOptions{});
  std::vector<double> taus;
  for (int i = 1; i <= 12; ++i) taus.push_back(0.5 * i);
  const auto traj =
      integrate_normalized(normalized_initial(psi, est.T, p1), p1, IntegratorOptions{}, taus.back(), taus);
  CHECK(traj.samples.size() == taus.size() + 1);
  double previous = std::numeric_limits<double>::infinity();
  for (const auto& s : traj.samples) {
    if (s.time_stamp() < 1.0) continue;
    const double d = cl_distance(s, 1.0, 0, distance_grid_size(16));
    CHECK(d < previous);
    previous = d;
  }
}

TEST_CASE("normalization rescales Q by a positive factor") {
  const FlowParams params{1, 16};
  SupportSpec spec;
  spec.harmonics[3] = {0.01, -0.02};
  spec.harmonics[2] = {0.03, 0.0};
  State psi = curvature_from_support(spec, params.modes());
  psi.set_real_pair(1, 0.02);  // break Q = 0 on purpose
  psi.set_time_stamp(0.2);
  const auto q = convexity_functional_Q(psi, 4096);
  const auto n = normalize(psi, 0.45, params);
  const auto qn = convexity_functional_Q(n.state, 4096);
  const double scale = normalization_scale(0.2, 0.45, 1);
  CHECK(std::abs(qn - q / scale) < 1e-12);
}
