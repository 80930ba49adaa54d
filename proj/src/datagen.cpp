#include "pcsf/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "pcsf/rates.hpp"

namespace pcsf {

double SupportSpec::radius_of_curvature(double theta) const {
  double v = base;
  for (const auto& [n, ab] : harmonics) {
    const double w = 1.0 - static_cast<double>(n) * n;
    v += w * (ab.first * std::cos(n * theta) + ab.second * std::sin(n * theta));
  }
  return v;
}

double SupportSpec::min_radius_of_curvature(int grid_size) const {
  double lowest = std::numeric_limits<double>::infinity();
  for (int j = 0; j < grid_size; ++j) {
    lowest = std::min(lowest, radius_of_curvature(2 * std::numbers::pi * j / grid_size));
  }
  return lowest;
}

void SupportSpec::validate() const {
  for (const auto& [n, ab] : harmonics) {
    if (n < 2) throw DomainError("support harmonics must have n >= 2");
  }
  const int grid = std::max(kDefaultSupportGrid, next_power_of_two(64 * std::max(1, max_harmonic())));
  if (!(min_radius_of_curvature(grid) > 0)) {
    throw DomainError("support function is not strictly convex (h + h'' <= 0 somewhere)");
  }
}

State curvature_from_support(const SupportSpec& spec, ModeSet modes, int grid_size) {
  spec.validate();
  if (grid_size < 8 * spec.max_harmonic()) throw DomainError("support grid too coarse for the highest harmonic");
  const auto g = GridFunction<double>::from(grid_size, [&](double theta) { return 1.0 / spec.radius_of_curvature(theta); });
  return forward_transform(g, modes);
}

SupportSpec perturbed_round_spec(double amplitude) {
  SupportSpec s;
  s.harmonics[2] = {amplitude, 0.0};
  return s;
}

namespace {

// Uniform in [-1, 1) from the raw 64-bit stream; independent of the
// standard library's distribution implementations.
double symmetric_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53 * 2.0 - 1.0;
}

}  // namespace

AdmissibleData random_admissible(std::uint64_t seed, ModeSet modes, double delta_target, double c_p) {
  if (!(delta_target > 0) || !(delta_target < 0.25)) throw DomainError("delta_target must lie in (0, 1/4)");
  if (!(c_p > 0)) throw DomainError("c_p must be positive");
  std::mt19937_64 rng(seed);
  const int top = std::min(modes.radius, 6);
  std::map<int, std::pair<double, double>> raw;
  for (int n = 2; n <= top; ++n) {
    // 1/k ~ 1 - sum (n^2-1)(a cos + b sin), so n^2 |k(n)| ~ n^2 (n^2-1) |a| / 2.
    const double w = 1.0 / (static_cast<double>(n) * n * (n * n - 1.0));
    const double a = symmetric_unit(rng) * w;
    const double b = symmetric_unit(rng) * w;
    raw[n] = {a, b};
  }

  double scale = 2.0 * delta_target;
  for (int attempt = 0; attempt < 400; ++attempt, scale *= 0.8) {
    SupportSpec spec;
    spec.seed = seed;
    for (const auto& [n, ab] : raw) spec.harmonics[n] = {scale * ab.first, scale * ab.second};
    if (!(spec.min_radius_of_curvature() > 0)) continue;
    State psi = curvature_from_support(spec, modes);
    const auto small = check_delta_smallness(psi, 0.9 * delta_target);
    const double bound = c_p * seminorm(psi, 2.0);
    if (small.pass && psi.mean() >= 1.1 * bound) return {std::move(psi), std::move(spec)};
  }
  // 0.8^400 is far below any double-precision perturbation: the constant limit.
  SupportSpec spec;
  spec.seed = seed;
  return {curvature_from_support(spec, modes), spec};
}

}  // namespace pcsf
