#pragma once

// Predicted exponents, power-law / exponential fits, admissibility checks on
// initial data and the per-quantity rate reports.

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pcsf/integrator.hpp"
#include "pcsf/spectral.hpp"

namespace pcsf {

/// alpha(n, p) = (n^2 - (p+2)/p) p/(p+1).
double alpha(int n, int p);

struct PredictedRates {
  int p = 1;
  double mode_decay = 0;        // (3p-2)/(p+1) = alpha(2, p)
  double convergence_rate = 0;  // 3p-1
  double blowup_exponent = 0;   // 1/(p+1)
  double mean_offset_rate = 0;  // 6p-2

  double alpha_n(int n) const { return alpha(n, p); }
};

PredictedRates predicted_rates(int p);

struct PowerLawFit {
  double exponent = 0;
  double amplitude = 0;
  double rms_residual = 0;
  std::size_t points = 0;
};

struct ExponentialFit {
  double rate = 0;
  double amplitude = 0;
  double rms_residual = 0;
  std::size_t points = 0;
};

using SamplePoint = std::pair<double, double>;

/// OLS of log y against log(T - t); the exponent is the slope. Needs >= 8
/// points, y > 0, t < T and at least one decade of spread in T - t.
PowerLawFit fit_power_law(std::span<const SamplePoint> points, double T);

/// OLS of log y against tau; rate = -slope. Needs >= 8 points with y > 0.
ExponentialFit fit_exponential(std::span<const SamplePoint> points);

struct TrappingCheck {
  bool pass = false;
  double margin = 0;
};

/// psi(0) >= c_p ||psi||_2.
TrappingCheck check_trapping(const State& psi, double c_p);

struct SmallnessCheck {
  bool pass = false;
  int worst_mode = 0;
  /// max over q != 0 of q^2 |psi(q)| / psi(0), governing pass/fail.
  double worst_ratio = 0;
  /// The same ratio with |psi(q)| replaced by max(|Re|, |Im|).
  double worst_ratio_componentwise = 0;
};

/// q^2 |psi(q)| <= delta psi(0) for every q != 0.
SmallnessCheck check_delta_smallness(const State& psi, double delta);

enum class RateKind {
  equality,     // |fitted - predicted| <= tolerance
  lower_bound,  // fitted >= predicted - tolerance
};

const char* to_string(RateKind k);

struct RateReport {
  std::string quantity;
  double fitted = 0;
  double predicted = 0;
  std::pair<double, double> window{0, 0};
  double rms_residual = 0;
  double tolerance = 0;
  RateKind kind = RateKind::equality;
  bool pass = false;
  std::size_t points = 0;

  void decide();
};

struct RateTolerances {
  double blowup = 0.01;            // absolute, on the blow-up exponent
  double mode_decay = 0.10;        // relative to (3p-2)/(p+1)
  double convergence = 0.05;       // relative to 3p-1
  double mean_offset_factor = 1.5;  // fitted >= factor * (3p-1)
};

/// Amplitudes below this are excluded from mode fits.
inline constexpr double kModeFloor = 1e-13;

/// Power-law fits of |k(n,t)| against T - t on the trajectory tail: n = 0
/// against -1/(p+1), n = 2 against (3p-2)/(p+1), and n = 1, 3, 4 against the
/// same value as a lower bound. Modes that never rise above kModeFloor in the
/// window are skipped.
std::vector<RateReport> mode_decay_report(const Trajectory& traj, double T, const FlowParams& params,
                                          const RateTolerances& tol = {});

/// Samples [first 20% and the final sample dropped] used for tail fits.
std::pair<std::size_t, std::size_t> tail_window(std::size_t sample_count);

/// Exponential fit of ||k~ - 1||_{C^l} over tau in [tau_lo, tau_hi].
RateReport convergence_report(const Trajectory& normalized, int order, double tau_lo, double tau_hi,
                              const FlowParams& params, const RateTolerances& tol = {});

/// Exponential fit of |mean(k~) - 1| over tau in [tau_lo, tau_hi], restricted
/// to samples above `floor`.
RateReport mean_offset_report(const Trajectory& normalized, double tau_lo, double tau_hi, const FlowParams& params,
                              const RateTolerances& tol = {}, double floor = 1e-11);

/// Grid size used when sampling C^l distances of states with radius N.
int distance_grid_size(int radius);

}  // namespace pcsf
