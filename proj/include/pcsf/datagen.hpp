#pragma once

// Initial curvature data built from support functions of convex curves.
// If h is the support function, 1/k = h + h'' has no e^{+-i theta} content,
// so Q(k) = int e^{i theta}/k = 0 holds by construction.

#include <cstdint>
#include <map>
#include <optional>
#include <utility>

#include "pcsf/integrator.hpp"

namespace pcsf {

struct SupportSpec {
  double base = 1.0;
  /// n >= 2 -> (a_n, b_n): h += a_n cos(n theta) + b_n sin(n theta).
  std::map<int, std::pair<double, double>> harmonics;
  std::optional<std::uint64_t> seed;

  int max_harmonic() const { return harmonics.empty() ? 0 : harmonics.rbegin()->first; }

  /// h(theta) + h''(theta).
  double radius_of_curvature(double theta) const;

  /// Minimum of h + h'' over a uniform grid of `grid_size` points.
  double min_radius_of_curvature(int grid_size = 4096) const;

  /// Rejects n < 2 harmonics and non-positive h + h''.
  void validate() const;

  friend bool operator==(const SupportSpec&, const SupportSpec&) = default;
};

inline constexpr int kDefaultSupportGrid = 4096;

/// k = 1/(h + h'') sampled on M points and transformed to Z.
State curvature_from_support(const SupportSpec& spec, ModeSet modes, int grid_size = kDefaultSupportGrid);

struct AdmissibleData {
  State state;
  SupportSpec spec;
};

/// Random harmonics n in {2..min(N,6)}, rescaled until the delta-smallness
/// and trapping checks both hold with a 10% margin. Deterministic in seed.
AdmissibleData random_admissible(std::uint64_t seed, ModeSet modes, double delta_target, double c_p);

/// Support spec {base 1, a_2 = amplitude}: the perturbed-round preset.
SupportSpec perturbed_round_spec(double amplitude = 0.05);

}  // namespace pcsf
