#pragma once

// Property suites run by `pcsf verify` and reused by the acceptance tests.

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <vector>

#include "pcsf/galerkin.hpp"
#include "pcsf/integrator.hpp"

namespace pcsf::verify {

struct SuiteResult {
  std::string name;
  bool pass = false;
  /// The measured quantity the suite gates on (largest discrepancy etc.).
  double measured = 0;
  double threshold = 0;
  std::string detail;
  double seconds = 0;
};

/// Random reality-symmetric state with mean in [1, 2) and off-modes of
/// modulus up to `spread` / n^2.
State random_state(ModeSet modes, std::uint64_t seed, double spread = 0.3);

/// max |conv - oracle| / max |oracle| over `states` random states for every
/// p in p_list and N in 1..max_radius.
SuiteResult oracle_equivalence(const std::vector<int>& p_list, int max_radius, int states,
                               const TupleWeight& weight = coefficient_H, double threshold = 1e-12);

struct RoundRun {
  int p = 1;
  double max_relative_error = 0;
  double T = 0;
  double T_error = 0;
  double final_mean = 0;
  std::size_t samples = 0;
};

/// Round data psi = 1: compares k(0, t) with (1 - ((p+1)/p) t)^{-1/(p+1)} over
/// the whole trajectory and T with p/(p+1).
RoundRun analytic_round_run(int p, int radius, const IntegratorOptions& opts);

SuiteResult analytic_round(const std::vector<int>& p_list, int radius, const IntegratorOptions& opts = {},
                           double T_tolerance = 1e-6);

/// RHS asymmetry on random states and state asymmetry after `steps`
/// accepted integrator steps.
SuiteResult reality(const std::vector<int>& p_list, int radius, int steps);

/// max |Q| along a blow-up trajectory started from random admissible data.
SuiteResult q_drift(int p, int radius, std::uint64_t seed, int grid_size = 4096, double threshold = 1e-8);

/// Real coordinates (Re k0, Re k1, Im k1, ..., Re kN, Im kN).
Eigen::VectorXd pack_real(const State& s);
State unpack_real(const Eigen::VectorXd& x, ModeSet modes);

/// Central-difference Jacobian of rhs_normalized at k~ = 1 in the packed
/// coordinates.
Eigen::MatrixXd normalized_jacobian_at_one(const FlowParams& params, double h = 1e-6);

struct SpectrumCheck {
  int p = 1;
  /// Sorted descending, computed and expected.
  std::vector<double> computed;
  std::vector<double> expected;
  double max_error = 0;
  double max_imaginary = 0;
};

/// Eigenvalues of the Jacobian against -p n^2 + p + 1 for n = 0..radius.
SpectrumCheck linear_spectrum_check(int p, int radius);

SuiteResult linear_spectrum(const std::vector<int>& p_list, int radius, double threshold = 1e-6);

struct VerifyConfig {
  std::vector<int> p_list{1, 2, 3};
  int max_radius = 4;
  int states = 50;
  IntegratorOptions opts;
  TupleWeight weight = coefficient_H;
};

std::vector<SuiteResult> run_all(const VerifyConfig& cfg = {});

}  // namespace pcsf::verify
