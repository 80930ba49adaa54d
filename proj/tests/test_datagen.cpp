#include "doctest.h"

#include <cmath>

#include "pcsf/datagen.hpp"
#include "pcsf/rates.hpp"

using namespace pcsf;

TEST_CASE("unit circle support") {
  const auto s = curvature_from_support(SupportSpec{}, make_mode_set(8));
  CHECK(s.mean() == doctest::Approx(1.0).epsilon(1e-15));
  for (int n = 1; n <= 8; ++n) CHECK(std::abs(s[n]) < 1e-15);
}

TEST_CASE("single cos 2 theta harmonic against the closed form") {
  // 1/(1 - b cos x) has mean 1/sqrt(1 - b^2) and cos(jx) coefficients
  // 2 r^j / sqrt(1 - b^2) with r = (1 - sqrt(1 - b^2)) / b.
  const double b = 0.15;  // (n^2 - 1) a_2 with a_2 = 0.05
  const double root = std::sqrt(1 - b * b);
  const double r = (1 - root) / b;
  const auto s = curvature_from_support(perturbed_round_spec(0.05), make_mode_set(16));
  CHECK(s.mean() == doctest::Approx(1 / root).epsilon(1e-14));
  CHECK(s[2].real() == doctest::Approx(r / root).epsilon(1e-13));
  CHECK(s[4].real() == doctest::Approx(r * r / root).epsilon(1e-12));
  CHECK(std::abs(s[1]) < 1e-15);
  CHECK(std::abs(s[3]) < 1e-15);
  CHECK(s.mean() == doctest::Approx(1.011443).epsilon(1e-6));
  CHECK(s[2].real() == doctest::Approx(0.076290).epsilon(1e-5));
}

TEST_CASE("support validation") {
  SupportSpec too_big = perturbed_round_spec(0.4);  // 1 - 1.2 cos 2 theta
  CHECK_THROWS_AS(curvature_from_support(too_big, make_mode_set(4)), DomainError);
  SupportSpec translation;
  translation.harmonics[1] = {0.1, 0.0};
  CHECK_THROWS_AS(translation.validate(), DomainError);
  CHECK(perturbed_round_spec(0.05).radius_of_curvature(0.0) == doctest::Approx(0.85));
}

TEST_CASE("support data satisfies Q = 0") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto d = random_admissible(seed, make_mode_set(16), 0.1, 4.0);
    CHECK(std::abs(convexity_functional_Q(d.state, 4096)) <= 1e-10);
    CHECK(evaluate(d.state, 256).samples.minCoeff() > 0);
  }
  SupportSpec spec;
  spec.harmonics[5] = {0.0004, -0.0002};
  spec.harmonics[16] = {0.000002, 0.000001};
  const auto s = curvature_from_support(spec, make_mode_set(32));
  CHECK(std::abs(convexity_functional_Q(s, 4096)) <= 1e-10);
  // k itself carries +-1 content even though 1/k does not
  spec.harmonics.clear();
  spec.harmonics[2] = {0.02, 0.0};
  spec.harmonics[3] = {0.0, 0.01};
  CHECK(std::abs(curvature_from_support(spec, make_mode_set(8))[1]) > 1e-6);
}

TEST_CASE("random admissible data") {
  const ModeSet z = make_mode_set(12);
  for (std::uint64_t seed : {1u, 2u, 99u, 12345u}) {
    const auto d = random_admissible(seed, z, 0.1, 4.0);
    CHECK(check_delta_smallness(d.state, 0.1).pass);
    CHECK(check_delta_smallness(d.state, 0.09).pass);
    CHECK(check_trapping(d.state, 4.0).pass);
    CHECK(d.state.mean() >= 1.1 * 4.0 * seminorm(d.state, 2.0));
    CHECK(d.spec.seed == seed);
    for (const auto& [n, ab] : d.spec.harmonics) {
      CHECK(n >= 2);
      CHECK(n <= 6);
    }
    const auto again = random_admissible(seed, z, 0.1, 4.0);
    CHECK(again.spec == d.spec);
    CHECK(again.state.coeffs() == d.state.coeffs());
  }
  CHECK(random_admissible(1, z, 0.1, 4.0).spec != random_admissible(2, z, 0.1, 4.0).spec);
  CHECK_THROWS_AS(random_admissible(1, z, 0.3, 4.0), DomainError);
  CHECK_THROWS_AS(random_admissible(1, z, 0.0, 4.0), DomainError);
}
