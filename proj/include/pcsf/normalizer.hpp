#pragma once

// Self-similar normalization of the blow-up:
//   k~ = ((p+1)/p)^{1/(p+1)} (T - t)^{1/(p+1)} k,   tau = -log(1 - t/T)/(p+1),
// under which the shrinking circle is the fixed point k~ = 1 and
//   k~_tau = p k~^{p+1} k~'' + p(p-1) k~^p (k~')^2 + k~^{p+2} - k~.

#include <vector>

#include "pcsf/integrator.hpp"

namespace pcsf {

struct NormalizedState {
  State state;  // time stamp equals tau
  double tau = 0;
};

double tau_of_t(double t, double T, int p);
double t_of_tau(double tau, double T, int p);

/// ((p+1)/p)^{1/(p+1)} (T - t)^{1/(p+1)}.
double normalization_scale(double t, double T, int p);

NormalizedState normalize(const State& s, double T, const FlowParams& params);

/// Normalizes every sample; the result carries domain normalized_tau.
Trajectory normalize_trajectory(const Trajectory& physical, double T);

/// k~(., 0) = ((p+1) T / p)^{1/(p+1)} psi.
NormalizedState normalized_initial(const State& psi, double T, const FlowParams& params);

ProductFlux<double> normalized_flux(int p);

/// Pseudo-spectral evaluation of the normalized right side on Z. Throws
/// PositivityError if k~ is not positive on the dealiased grid.
State rhs_normalized(const State& s, const FlowParams& params);

/// Default tau horizon 10/(3p-1).
double default_tau_max(int p);

/// Adaptive integration of the normalized flow in tau. With `output_taus`
/// the trajectory holds the initial state and exactly those tau values.
Trajectory integrate_normalized(const NormalizedState& initial, const FlowParams& params, const IntegratorOptions& opts,
                                double tau_max, const std::vector<double>& output_taus = {});

}  // namespace pcsf
