#include "pcsf/verify.hpp"

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

#include "pcsf/datagen.hpp"
#include "pcsf/normalizer.hpp"

namespace pcsf::verify {

namespace {

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

double uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::string join_p(const std::vector<int>& p_list) {
  std::string out;
  for (int p : p_list) out += (out.empty() ? "" : ",") + std::to_string(p);
  return out;
}

}  // namespace

State random_state(ModeSet modes, std::uint64_t seed, double spread) {
  std::mt19937_64 rng(seed);
  State s(modes);
  s[0] = 1.0 + uniform(rng);
  for (int n = 1; n <= modes.radius; ++n) {
    const double scale = spread / (static_cast<double>(n) * n);
    s.set_real_pair(n, {scale * (2 * uniform(rng) - 1), scale * (2 * uniform(rng) - 1)});
  }
  return s;
}

SuiteResult oracle_equivalence(const std::vector<int>& p_list, int max_radius, int states, const TupleWeight& weight,
                               double threshold) {
  Stopwatch clock;
  SuiteResult r;
  r.name = "oracle_equivalence";
  r.threshold = threshold;
  double worst = 0;
  std::string where;
  for (int p : p_list) {
    for (int radius = 1; radius <= max_radius; ++radius) {
      const FlowParams params{p, radius, RhsMethod::oracle};
      const ConvolutionRhs<double> fast(params);
      for (int i = 0; i < states; ++i) {
        const auto seed = static_cast<std::uint64_t>(1000003 * p + 7919 * radius + i);
        const State s = random_state(params.modes(), seed);
        const State slow = rhs_oracle(s, params, weight);
        const State quick = fast(s);
        const double scale = slow.max_modulus();
        const double diff = (quick.coeffs() - slow.coeffs()).cwiseAbs().maxCoeff() / scale;
        if (diff > worst) {
          worst = diff;
          where = fmt::format("p={} N={} state {}", p, radius, i);
        }
      }
    }
  }
  r.measured = worst;
  r.pass = worst <= threshold;
  r.detail = fmt::format("max relative discrepancy {:.3e} ({}), p in {{{}}}, N <= {}, {} states each", worst, where,
                         join_p(p_list), max_radius, states);
  r.seconds = clock.seconds();
  return r;
}

RoundRun analytic_round_run(int p, int radius, const IntegratorOptions& opts) {
  const FlowParams params{p, radius, RhsMethod::convolution};
  const State psi = State::constant(params.modes(), 1.0);
  const auto [traj, est] = integrate_to_blowup(psi, params, opts);
  RoundRun run;
  run.p = p;
  const double T_exact = static_cast<double>(p) / (p + 1);
  for (const auto& s : traj.samples) {
    const double exact = std::pow(1.0 - s.time_stamp() / T_exact, -1.0 / (p + 1));
    run.max_relative_error = std::max(run.max_relative_error, std::abs(s.mean() - exact) / exact);
  }
  run.T = est.T;
  run.T_error = std::abs(est.T - T_exact);
  run.final_mean = traj.samples.back().mean();
  run.samples = traj.samples.size();
  return run;
}

SuiteResult analytic_round(const std::vector<int>& p_list, int radius, const IntegratorOptions& opts,
                           double T_tolerance) {
  Stopwatch clock;
  SuiteResult r;
  r.name = "analytic_round";
  r.threshold = 10 * opts.rel_tol;
  r.pass = true;
  for (int p : p_list) {
    const RoundRun run = analytic_round_run(p, radius, opts);
    r.measured = std::max(r.measured, run.max_relative_error);
    const bool ok = run.max_relative_error <= r.threshold && run.T_error <= T_tolerance;
    r.pass = r.pass && ok;
    r.detail += fmt::format("{}p={}: rel err {:.2e} (<= {:.0e} {}), |T - p/(p+1)| {:.2e} (<= {:.0e} {}), k0 end {:.4g}",
                            r.detail.empty() ? "" : "; ", p, run.max_relative_error, r.threshold,
                            run.max_relative_error <= r.threshold ? "ok" : "FAIL", run.T_error, T_tolerance,
                            run.T_error <= T_tolerance ? "ok" : "FAIL", run.final_mean);
  }
  r.seconds = clock.seconds();
  return r;
}

SuiteResult reality(const std::vector<int>& p_list, int radius, int steps) {
  Stopwatch clock;
  SuiteResult r;
  r.name = "reality";
  r.threshold = 1e-12;
  double rhs_worst = 0, step_worst = 0;
  for (int p : p_list) {
    FlowParams params{p, radius, RhsMethod::convolution};
    for (int i = 0; i < 10; ++i) {
      const State s = random_state(params.modes(), 77 + static_cast<std::uint64_t>(i));
      for (auto method : {RhsMethod::oracle, RhsMethod::convolution}) {
        params.rhs_method = method;
        const State d = rhs(s, params);
        rhs_worst = std::max(rhs_worst, reality_defect(d) / d.max_modulus());
      }
    }
    params.rhs_method = RhsMethod::convolution;
    IntegratorOptions opts;
    DormandPrince stepper(make_physical_rhs(params), opts);
    State s = random_state(params.modes(), 4242 + static_cast<std::uint64_t>(p), 0.1);
    double dt = 1e-5;
    for (int taken = 0; taken < steps;) {
      auto res = stepper.attempt(s, dt);
      dt = std::min(res.dt_next, 1e-5);
      if (!res.accepted) continue;
      s = std::move(res.state);
      step_worst = std::max(step_worst, reality_defect(s));
      ++taken;
    }
  }
  r.measured = std::max(rhs_worst, step_worst);
  r.pass = rhs_worst <= 1e-13 && step_worst <= r.threshold;
  r.detail = fmt::format("rhs asymmetry {:.2e} (<= 1e-13), after {} steps {:.2e} (<= 1e-12)", rhs_worst, steps,
                         step_worst);
  r.seconds = clock.seconds();
  return r;
}

SuiteResult q_drift(int p, int radius, std::uint64_t seed, int grid_size, double threshold) {
  Stopwatch clock;
  SuiteResult r;
  r.name = "q_drift";
  r.threshold = threshold;
  const FlowParams params{p, radius, RhsMethod::convolution};
  const auto data = random_admissible(seed, params.modes(), 0.1, 4.0);
  const auto [traj, est] = integrate_to_blowup(data.state, params, IntegratorOptions{});
  for (const auto& s : traj.samples) r.measured = std::max(r.measured, std::abs(convexity_functional_Q(s, grid_size)));
  r.pass = r.measured <= threshold;
  r.detail = fmt::format("max |Q| {:.2e} over {} samples (p={}, N={}, seed {}, M={})", r.measured, traj.samples.size(),
                         p, radius, seed, grid_size);
  r.seconds = clock.seconds();
  return r;
}

Eigen::VectorXd pack_real(const State& s) {
  Eigen::VectorXd x(s.modes().size());
  x[0] = s[0].real();
  for (int n = 1; n <= s.radius(); ++n) {
    x[2 * n - 1] = s[n].real();
    x[2 * n] = s[n].imag();
  }
  return x;
}

State unpack_real(const Eigen::VectorXd& x, ModeSet modes) {
  State s(modes);
  s[0] = x[0];
  for (int n = 1; n <= modes.radius; ++n) s.set_real_pair(n, {x[2 * n - 1], x[2 * n]});
  return s;
}

Eigen::MatrixXd normalized_jacobian_at_one(const FlowParams& params, double h) {
  const ModeSet modes = params.modes();
  const Eigen::VectorXd base = pack_real(State::constant(modes, 1.0));
  const auto dim = base.size();
  Eigen::MatrixXd jac(dim, dim);
  for (Eigen::Index j = 0; j < dim; ++j) {
    Eigen::VectorXd plus = base, minus = base;
    plus[j] += h;
    minus[j] -= h;
    jac.col(j) = (pack_real(rhs_normalized(unpack_real(plus, modes), params)) -
                  pack_real(rhs_normalized(unpack_real(minus, modes), params))) /
                 (2 * h);
  }
  return jac;
}

SpectrumCheck linear_spectrum_check(int p, int radius) {
  const FlowParams params{p, radius, RhsMethod::convolution};
  const Eigen::MatrixXd jac = normalized_jacobian_at_one(params);
  Eigen::EigenSolver<Eigen::MatrixXd> solver(jac, false);
  SpectrumCheck c;
  c.p = p;
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
    c.computed.push_back(solver.eigenvalues()[i].real());
    c.max_imaginary = std::max(c.max_imaginary, std::abs(solver.eigenvalues()[i].imag()));
  }
  c.expected.push_back(p + 1.0);
  for (int n = 1; n <= radius; ++n) {
    const double lambda = -static_cast<double>(p) * n * n + p + 1;
    c.expected.insert(c.expected.end(), 2, lambda);  // cos and sin directions
  }
  std::sort(c.computed.begin(), c.computed.end(), std::greater<>());
  std::sort(c.expected.begin(), c.expected.end(), std::greater<>());
  for (std::size_t i = 0; i < c.expected.size(); ++i) {
    c.max_error = std::max(c.max_error, std::abs(c.computed[i] - c.expected[i]));
  }
  c.max_error = std::max(c.max_error, c.max_imaginary);
  return c;
}

SuiteResult linear_spectrum(const std::vector<int>& p_list, int radius, double threshold) {
  Stopwatch clock;
  SuiteResult r;
  r.name = "linear_spectrum";
  r.threshold = threshold;
  for (int p : p_list) {
    const auto c = linear_spectrum_check(p, radius);
    r.measured = std::max(r.measured, c.max_error);
    std::string values;
    for (double v : c.computed) values += fmt::format("{}{:.6f}", values.empty() ? "" : " ", v);
    r.detail += fmt::format("{}p={}: [{}] err {:.1e}", r.detail.empty() ? "" : "; ", p, values, c.max_error);
  }
  r.pass = r.measured <= threshold;
  r.seconds = clock.seconds();
  return r;
}

std::vector<SuiteResult> run_all(const VerifyConfig& cfg) {
  const int radius = std::min(cfg.max_radius, 3);
  std::vector<SuiteResult> out;
  out.push_back(oracle_equivalence(cfg.p_list, cfg.max_radius, cfg.states, cfg.weight));
  out.push_back(analytic_round(cfg.p_list, 1, cfg.opts));
  out.push_back(reality(cfg.p_list, cfg.max_radius, 1000));
  out.push_back(q_drift(cfg.p_list.front(), 16, 1));
  out.push_back(linear_spectrum(cfg.p_list, radius));
  return out;
}

}  // namespace pcsf::verify
