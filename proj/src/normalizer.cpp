#include "pcsf/normalizer.hpp"

#include <cmath>
#include <limits>
#include <memory>

namespace pcsf {

double tau_of_t(double t, double T, int p) {
  if (!(T > 0) || !(t >= 0) || !(t < T)) throw DomainError("tau_of_t needs 0 <= t < T");
  return -std::log1p(-t / T) / (p + 1);
}

double t_of_tau(double tau, double T, int p) {
  if (!(T > 0) || !(tau >= 0)) throw DomainError("t_of_tau needs tau >= 0 and T > 0");
  return -T * std::expm1(-(p + 1) * tau);
}

double normalization_scale(double t, double T, int p) {
  if (!(t < T)) throw DomainError("normalization needs t < T");
  return std::pow((p + 1.0) / p * (T - t), 1.0 / (p + 1));
}

NormalizedState normalize(const State& s, double T, const FlowParams& params) {
  const double t = s.time_stamp();
  const double scale = normalization_scale(t, T, params.p);
  const double tau = tau_of_t(t, T, params.p);
  State out(s.modes(), s.coeffs() * scale, tau);
  return {std::move(out), tau};
}

Trajectory normalize_trajectory(const Trajectory& physical, double T) {
  if (physical.domain != TimeDomain::physical_t) throw DomainError("trajectory is already normalized");
  Trajectory out;
  out.params = physical.params;
  out.domain = TimeDomain::normalized_tau;
  out.warnings = physical.warnings;
  out.samples.reserve(physical.samples.size());
  for (const auto& s : physical.samples) {
    if (!(s.time_stamp() < T)) break;
    out.samples.push_back(normalize(s, T, physical.params).state);
  }
  return out;
}

NormalizedState normalized_initial(const State& psi, double T, const FlowParams& params) {
  if (!(T > 0)) throw DomainError("blow-up time must be positive");
  const double scale = std::pow((params.p + 1.0) * T / params.p, 1.0 / (params.p + 1));
  return {State(psi.modes(), psi.coeffs() * scale, 0.0), 0.0};
}

ProductFlux<double> normalized_flux(int p) {
  return {static_cast<double>(p), static_cast<double>(p) * (p - 1), 1.0, -1.0};
}

namespace {

RhsFunction make_normalized_rhs(const FlowParams& params) {
  auto evaluator = std::make_shared<const ConvolutionRhs<double>>(params.p, params.modes(), normalized_flux(params.p));
  return [evaluator](const State& s) {
    double lowest = 0;
    auto out = (*evaluator)(s, &lowest);
    if (!(lowest > 0)) throw PositivityError("normalized curvature is no longer positive");
    return out;
  };
}

}  // namespace

State rhs_normalized(const State& s, const FlowParams& params) {
  if (s.radius() != params.N) throw DomainError("state radius does not match FlowParams.N");
  return make_normalized_rhs(params)(s);
}

double default_tau_max(int p) { return 10.0 / (3.0 * p - 1); }

Trajectory integrate_normalized(const NormalizedState& initial, const FlowParams& params, const IntegratorOptions& opts,
                                double tau_max, const std::vector<double>& output_taus) {
  params.validate();
  if (!(tau_max > initial.tau)) throw DomainError("tau_max must exceed the initial tau");
  if (!(initial.state.mean() > 0)) throw DomainError("normalized mean must be positive");
  IntegrationRequest req;
  req.rhs = make_normalized_rhs(params);
  req.t_end = tau_max;
  for (double tau : output_taus) {
    if (tau > initial.tau && tau <= tau_max) req.output_times.push_back(tau);
  }
  State start = initial.state;
  start.set_time_stamp(initial.tau);
  auto outcome = integrate(start, opts, req);

  Trajectory traj;
  traj.params = params;
  traj.domain = TimeDomain::normalized_tau;
  traj.samples = std::move(outcome.samples);
  traj.validate();
  return traj;
}

}  // namespace pcsf
