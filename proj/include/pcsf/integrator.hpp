#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pcsf/galerkin.hpp"
#include "pcsf/spectral.hpp"

namespace pcsf {

using State = FourierState<double>;

struct IntegratorOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-15;
  double dt_init = 1e-4;
  double dt_min = 1e-18;
  /// Stop once k(0) reaches this value. Zero selects default_blowup_cap().
  double blowup_cap = 0;
  long max_steps = 2'000'000;
  int sample_stride = 1;

  void validate() const;
};

/// k(0) growth that lets (T - t) span six decades: 10^{6/(p+1)} k(0, 0).
double default_blowup_cap(int p, double initial_mean);

enum class TimeDomain { physical_t, normalized_tau };

const char* to_string(TimeDomain d);

struct Trajectory {
  FlowParams params;
  std::vector<State> samples;
  TimeDomain domain = TimeDomain::physical_t;
  std::vector<std::string> warnings;

  std::vector<double> times() const;
  /// Series of one coefficient across the samples.
  std::vector<std::complex<double>> mode_series(int n) const;
  void validate() const;
};

struct BlowupEstimate {
  double T = 0;
  double uncertainty = 0;
  std::pair<double, double> fit_window{0, 0};
  double fit_residual = 0;
  std::size_t fit_samples = 0;
};

using RhsFunction = std::function<State(const State&)>;

/// Result of one attempted Dormand-Prince step.
struct StepResult {
  State state;
  /// Max-norm of the embedded error scaled by abs_tol + rel_tol |y|.
  double error_estimate = 0;
  double dt_next = 0;
  bool accepted = false;
};

/// Dormand-Prince 5(4) with a PI step-size controller.
class DormandPrince {
 public:
  DormandPrince(RhsFunction rhs, IntegratorOptions opts);

  /// Attempts one step of size dt from `state`. On acceptance the controller
  /// history advances; on rejection dt_next is the reduced retry size.
  StepResult attempt(const State& state, double dt);

  const IntegratorOptions& options() const noexcept { return opts_; }
  long rhs_evaluations() const noexcept { return evaluations_; }

 private:
  RhsFunction rhs_;
  IntegratorOptions opts_;
  double previous_error_ = 1e-4;
  bool rejected_last_ = false;
  long evaluations_ = 0;
  std::optional<State> fsal_;  // derivative at the last accepted state
  double fsal_time_ = 0;
};

/// One embedded RK(5,4) step of the Galerkin system (fresh controller state).
/// Throws StepUnderflowError if the proposed next size drops below dt_min.
StepResult step(const State& state, const FlowParams& params, double dt, const IntegratorOptions& opts);

/// Builds the physical right side for params.rhs_method.
RhsFunction make_physical_rhs(const FlowParams& params);

/// Generic adaptive driver.
struct IntegrationRequest {
  RhsFunction rhs;
  /// Grid-positivity check on accepted states; may be empty.
  std::function<void(const State&)> check;
  double t_end = std::numeric_limits<double>::infinity();
  /// Stop after the first accepted state satisfying the predicate.
  std::function<bool(const State&)> stop;
  /// When non-empty, steps are clipped to land on these times and only these
  /// times (plus the initial state) are sampled.
  std::vector<double> output_times;
  bool stop_on_underflow = false;
};

struct IntegrationOutcome {
  std::vector<State> samples;
  long steps = 0;
  long rejected = 0;
  bool underflow = false;
};

IntegrationOutcome integrate(const State& initial, const IntegratorOptions& opts, const IntegrationRequest& req);

/// Integrates the physical flow until k(0) >= blowup_cap (or step underflow
/// near the singularity) and estimates the blow-up time from the tail.
std::pair<Trajectory, BlowupEstimate> integrate_to_blowup(const State& initial, const FlowParams& params,
                                                           const IntegratorOptions& opts,
                                                           std::optional<double> delta = std::nullopt,
                                                           std::optional<double> c_p = std::nullopt);

/// Affine least-squares fit of (p/(p+1)) k(0,t)^{-(p+1)} against t on the
/// trajectory tail; T is the root of the fitted line.
BlowupEstimate estimate_T(const Trajectory& traj, const FlowParams& params);

/// Fails with PositivityError if k is not strictly positive on the dealiased
/// grid of the state.
void check_positive(const State& s, int p);

}  // namespace pcsf
