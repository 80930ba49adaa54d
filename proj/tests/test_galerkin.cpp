#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "pcsf/galerkin.hpp"
#include "pcsf/verify.hpp"

using namespace pcsf;
using Complex = std::complex<double>;
using S = FourierState<double>;

namespace {

// All (q1, q2, q3) in Z^3 with q1 + q2 + q3 = n, by exhaustive search.
std::set<IndexTuple> brute_force_triples(int n, ModeSet z) {
  std::set<IndexTuple> out;
  for (int a = -z.radius; a <= z.radius; ++a)
    for (int b = -z.radius; b <= z.radius; ++b)
      for (int c = -z.radius; c <= z.radius; ++c)
        if (a + b + c == n) out.insert({a, b, c});
  return out;
}

int nonzero_count(const IndexTuple& q) {
  return static_cast<int>(std::count_if(q.begin(), q.end(), [](int v) { return v != 0; }));
}

double max_rel(const S& a, const S& b) {
  return (a.coeffs() - b.coeffs()).cwiseAbs().maxCoeff() / std::max(b.max_modulus(), 1e-300);
}

}  // namespace

TEST_CASE("coefficient_H") {
  for (long q1 = -3; q1 <= 3; ++q1)
    for (long q2 = -3; q2 <= 3; ++q2) CHECK(coefficient_H(1, q1, q2) == doctest::Approx(1.0 - q1 * q1));
  CHECK(coefficient_H(2, 1, 1) == doctest::Approx(-1.5));
  CHECK(coefficient_H(3, 0, 5) == doctest::Approx(1.0 / 3));
}

TEST_CASE("tuple enumeration matches exhaustive search") {
  const ModeSet z = make_mode_set(1);
  const auto b0 = enumerate_Bn(0, z, 1);
  const auto expected = brute_force_triples(0, z);
  CHECK(std::set<IndexTuple>(b0.begin(), b0.end()) == expected);
  CHECK(b0.size() == expected.size());
  CHECK(b0.size() == 7);

  const auto a0 = enumerate_An(0, z, 1);
  std::size_t expected_a = 0;
  for (const auto& q : expected) expected_a += nonzero_count(q) >= 2;
  CHECK(a0.size() == expected_a);
  CHECK(a0.size() == b0.size() - 1);  // only (0,0,0) removed
  for (const auto& q : a0) CHECK(nonzero_count(q) >= 2);

  CHECK(enumerate_Bn(4, z, 1).empty());
  const auto single = enumerate_Bn(0, make_mode_set(0), 1);
  REQUIRE(single.size() == 1);
  CHECK(single[0] == IndexTuple{0, 0, 0});
  CHECK(enumerate_Cn(0, z, 1).empty());

  for (const auto& q : enumerate_An(1, make_mode_set(2), 1)) CHECK(nonzero_count(q) >= 2);
  for (int n = -2; n <= 2; ++n) {
    const auto got = enumerate_Bn(n, make_mode_set(2), 1);
    CHECK(std::set<IndexTuple>(got.begin(), got.end()) == brute_force_triples(n, make_mode_set(2)));
  }
  for (const auto& q : enumerate_Cn(0, make_mode_set(4), 2)) {
    for (int v : q) CHECK(std::abs(v) >= 2);
  }
}

TEST_CASE("B_n splits into the linear tuples and A_n") {
  for (int p = 1; p <= 3; ++p)
    for (int radius = 0; radius <= 4; ++radius) CHECK(linear_decomposition_holds(p, make_mode_set(radius)));
}

TEST_CASE("oracle on constant and near-constant states") {
  for (int p = 1; p <= 3; ++p) {
    const FlowParams params{p, 3, RhsMethod::oracle};
    const auto d = rhs_oracle(S::constant(params.modes(), 1.3), params);
    CHECK(d[0].real() == doctest::Approx(std::pow(1.3, p + 2) / p).epsilon(1e-14));
    for (int n = 1; n <= 3; ++n) CHECK(std::abs(d[n]) == 0.0);
  }
  // {0: 1, +-2: eps}: linear part (3 - 4) eps, remainder O(eps^2).
  const FlowParams params{1, 2, RhsMethod::oracle};
  for (double eps : {1e-3, 1e-4}) {
    S s(params.modes());
    s[0] = 1.0;
    s.set_real_pair(2, eps);
    const auto d = rhs_oracle(s, params);
    CHECK(std::abs(d[2] + eps) < 10 * eps * eps);
  }
}

TEST_CASE("convolution path") {
  for (int p = 1; p <= 3; ++p) {
    const FlowParams params{p, 4, RhsMethod::convolution};
    const auto d = rhs_convolution(S::constant(params.modes(), 0.8), params);
    CHECK(d[0].real() == doctest::Approx(std::pow(0.8, p + 2) / p).epsilon(1e-14));
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const auto s = verify::random_state(params.modes(), seed);
      CHECK(max_rel(rhs_convolution(s, params), rhs_oracle(s, params)) < 1e-12);
    }
  }
  // 1 + 0.01 cos 3 theta, p = 1: mode 3 derivative (3 - 9) 0.005 + O(1e-4).
  const FlowParams params{1, 3, RhsMethod::convolution};
  S s(params.modes());
  s[0] = 1.0;
  s.set_real_pair(3, 0.005);
  CHECK(std::abs(rhs_convolution(s, params)[3] - (-0.03)) < 1e-4);
  CHECK(ConvolutionRhs<double>::dealiased_grid_size(1, 3) == 32);
  CHECK_THROWS_AS(rhs_convolution(S::constant(make_mode_set(2), 1.0), params), DomainError);
}

TEST_CASE("reality, rotation equivariance and homogeneity") {
  for (int p = 1; p <= 3; ++p) {
    for (auto method : {RhsMethod::oracle, RhsMethod::convolution}) {
      const FlowParams params{p, 3, method};
      const auto s = verify::random_state(params.modes(), 11 + p);
      const auto d = rhs(s, params);
      CHECK(reality_defect(d) <= 1e-13 * d.max_modulus());

      const double theta0 = 0.7;
      S rotated = s;
      for (int n = -3; n <= 3; ++n) rotated[n] *= std::polar(1.0, n * theta0);
      S d_rotated = d;
      for (int n = -3; n <= 3; ++n) d_rotated[n] *= std::polar(1.0, n * theta0);
      CHECK(max_rel(rhs(rotated, params), d_rotated) < 1e-12);

      const double lambda = 1.7;
      S scaled = s;
      scaled.coeffs() *= lambda;
      S expected = d;
      expected.coeffs() *= std::pow(lambda, p + 2);
      CHECK(max_rel(rhs(scaled, params), expected) < 1e-12);
    }
  }
}

TEST_CASE("rhs_split") {
  const FlowParams params{2, 3, RhsMethod::convolution};
  const auto c = rhs_split(S::constant(params.modes(), 1.1), params);
  CHECK(c.nonlinear.max_modulus() < 1e-14);
  CHECK(c.linear[0].real() == doctest::Approx(std::pow(1.1, 4) / 2));

  const auto s = verify::random_state(params.modes(), 5);
  const auto split = rhs_split(s, params);
  S sum = split.linear;
  sum.coeffs() += split.nonlinear.coeffs();
  CHECK(max_rel(sum, rhs_convolution(s, params)) < 1e-12);
  const Complex expected_lin = ((4.0 / 2) - 4.0) * std::pow(s[0], 3) * s[2];
  CHECK(std::abs(split.linear[2] - expected_lin) < 1e-14);

  // Nonlinear remainder scales like eps^2 when the off-modes are O(eps).
  auto remainder = [&](double eps) {
    S t(params.modes());
    t[0] = 1.0;
    t.set_real_pair(1, Complex(0.3 * eps, 0.1 * eps));
    t.set_real_pair(2, 0.5 * eps);
    t.set_real_pair(3, Complex(0, -0.2 * eps));
    const auto sp = rhs_split(t, params);
    double worst = 0;
    for (int n = 1; n <= 3; ++n) worst = std::max(worst, std::abs(sp.nonlinear[n]));
    return worst;
  };
  const double ratio = remainder(1e-3) / remainder(1e-4);
  CHECK(ratio == doctest::Approx(100.0).epsilon(0.02));
}

TEST_CASE("mean grows for positive, nearly round curvature") {
  for (int p = 1; p <= 3; ++p) {
    const FlowParams params{p, 4, RhsMethod::convolution};
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const auto s = verify::random_state(params.modes(), seed, 0.05);
      CHECK(rhs(s, params)[0].real() > 0);
    }
  }
}

TEST_CASE("a corrupted kernel is caught by the oracle comparison") {
  const TupleWeight flipped = [](int p, long q1, long q2) {
    return 1.0 / p - (p - 1.0) * q1 * q2 + static_cast<double>(q1) * q1;
  };
  const auto good = verify::oracle_equivalence({1, 2}, 2, 5);
  const auto bad = verify::oracle_equivalence({1, 2}, 2, 5, flipped);
  CHECK(good.pass);
  CHECK_FALSE(bad.pass);
  CHECK(bad.measured > 1e-3);
}

TEST_CASE("FlowParams validation") {
  CHECK_THROWS_WITH_AS((FlowParams{0, 4}.validate()), "p must be ≥ 1", ConfigError);
  CHECK_THROWS_AS((FlowParams{1, 0}.validate()), ConfigError);
  CHECK(parse_rhs_method("oracle") == RhsMethod::oracle);
  CHECK(parse_rhs_method("conv") == RhsMethod::convolution);
  CHECK_THROWS_AS(parse_rhs_method("fft"), ConfigError);
}
