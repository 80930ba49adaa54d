#include "pcsf/integrator.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "pcsf/log.hpp"
#include "pcsf/rates.hpp"

namespace pcsf {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784, a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200, e6 = 22.0 / 525,
                 e7 = -1.0 / 40;

// PI controller constants (Hairer & Wanner's DOPRI5 defaults).
constexpr double kBeta = 0.04;
constexpr double kExpo = 0.2 - 0.75 * kBeta;
constexpr double kSafety = 0.9;
constexpr double kMaxShrink = 5.0;   // h_new >= h / 5
constexpr double kMaxGrowth = 10.0;  // h_new <= 10 h

constexpr double kRealityDrift = 1e-13;

State with_coeffs(const State& like, CoeffVector<double> c, double t) { return State(like.modes(), std::move(c), t); }

double scaled_error(const CoeffVector<double>& err, const CoeffVector<double>& y0, const CoeffVector<double>& y1,
                    const IntegratorOptions& opts) {
  double worst = 0;
  for (Eigen::Index i = 0; i < err.size(); ++i) {
    const double sc_re = opts.abs_tol + opts.rel_tol * std::max(std::abs(y0[i].real()), std::abs(y1[i].real()));
    const double sc_im = opts.abs_tol + opts.rel_tol * std::max(std::abs(y0[i].imag()), std::abs(y1[i].imag()));
    worst = std::max({worst, std::abs(err[i].real()) / sc_re, std::abs(err[i].imag()) / sc_im});
  }
  return worst;
}

}  // namespace

void IntegratorOptions::validate() const {
  if (!(rel_tol > 0) || !(abs_tol > 0)) throw ConfigError("rel_tol and abs_tol must be positive");
  if (!(dt_min > 0) || !(dt_min <= dt_init)) throw ConfigError("need 0 < dt_min <= dt_init");
  if (max_steps < 1) throw ConfigError("max_steps must be positive");
  if (sample_stride < 1) throw ConfigError("sample_stride must be positive");
  if (blowup_cap < 0) throw ConfigError("blowup_cap must be non-negative (0 selects the default)");
}

double default_blowup_cap(int p, double initial_mean) {
  return initial_mean * std::pow(10.0, 6.0 / (p + 1));
}

const char* to_string(TimeDomain d) { return d == TimeDomain::physical_t ? "physical_t" : "normalized_tau"; }

std::vector<double> Trajectory::times() const {
  std::vector<double> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(s.time_stamp());
  return out;
}

std::vector<std::complex<double>> Trajectory::mode_series(int n) const {
  std::vector<std::complex<double>> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(s.at(n));
  return out;
}

void Trajectory::validate() const {
  for (std::size_t i = 1; i < samples.size(); ++i) {
    if (!(samples[i].time_stamp() > samples[i - 1].time_stamp())) {
      throw DomainError("trajectory time stamps must be strictly increasing");
    }
    if (samples[i].modes() != samples[0].modes()) throw DomainError("trajectory samples must share one mode set");
  }
}

DormandPrince::DormandPrince(RhsFunction rhs, IntegratorOptions opts) : rhs_(std::move(rhs)), opts_(opts) {}

StepResult DormandPrince::attempt(const State& state, double dt) {
  const auto& y = state.coeffs();
  const double t = state.time_stamp();
  auto eval = [&](const CoeffVector<double>& c, double at) {
    ++evaluations_;
    return rhs_(with_coeffs(state, c, at)).coeffs();
  };

  CoeffVector<double> k1;
  if (fsal_ && fsal_time_ == t && fsal_->coeffs().size() == y.size()) {
    k1 = fsal_->coeffs();
  } else {
    k1 = eval(y, t);
  }
  const CoeffVector<double> k2 = eval(y + dt * (a21 * k1), t + c2 * dt);
  const CoeffVector<double> k3 = eval(y + dt * (a31 * k1 + a32 * k2), t + c3 * dt);
  const CoeffVector<double> k4 = eval(y + dt * (a41 * k1 + a42 * k2 + a43 * k3), t + c4 * dt);
  const CoeffVector<double> k5 = eval(y + dt * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4), t + c5 * dt);
  const CoeffVector<double> k6 = eval(y + dt * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5), t + dt);
  const CoeffVector<double> y1 = y + dt * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
  const CoeffVector<double> k7 = eval(y1, t + dt);
  const CoeffVector<double> err = dt * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

  StepResult out;
  out.error_estimate = scaled_error(err, y, y1, opts_);
  const double e = std::max(out.error_estimate, 1e-300);
  const double fac11 = std::pow(e, kExpo);

  if (out.error_estimate <= 1.0 && std::isfinite(out.error_estimate)) {
    double fac = fac11 / std::pow(previous_error_, kBeta);
    fac = std::clamp(fac / kSafety, 1.0 / kMaxGrowth, kMaxShrink);
    double next = dt / fac;
    if (rejected_last_) next = std::min(next, dt);
    previous_error_ = std::max(out.error_estimate, 1e-4);
    rejected_last_ = false;
    out.accepted = true;
    out.dt_next = next;
    out.state = with_coeffs(state, y1, t + dt);
    if (reality_defect(out.state) > kRealityDrift * out.state.max_modulus()) {
      log::debug("reality drift above 1e-13 relative; re-symmetrizing");
    }
    // Averaging with the mirror moves y1 by at most the drift, far inside the
    // step error, so the stage-7 derivative stays valid for FSAL reuse.
    symmetrize(out.state);
    fsal_ = with_coeffs(state, k7, t + dt);
    fsal_time_ = t + dt;
  } else {
    const double shrink = std::isfinite(out.error_estimate) ? std::min(kMaxShrink, fac11 / kSafety) : kMaxShrink;
    out.dt_next = dt / shrink;
    out.accepted = false;
    out.state = state;
    rejected_last_ = true;
  }
  return out;
}

RhsFunction make_physical_rhs(const FlowParams& params) {
  if (params.rhs_method == RhsMethod::oracle) {
    return [params](const State& s) { return rhs_oracle(s, params); };
  }
  auto evaluator = std::make_shared<const ConvolutionRhs<double>>(params);
  return [evaluator](const State& s) { return (*evaluator)(s); };
}

StepResult step(const State& state, const FlowParams& params, double dt, const IntegratorOptions& opts) {
  if (dt < opts.dt_min) throw DomainError("step size below dt_min");
  DormandPrince stepper(make_physical_rhs(params), opts);
  auto res = stepper.attempt(state, dt);
  if (res.dt_next < opts.dt_min) throw StepUnderflowError("step size underflow (dt_next < dt_min)");
  return res;
}

void check_positive(const State& s, int p) {
  const FftPlan<double> plan(ConvolutionRhs<double>::dealiased_grid_size(p, s.radius()));
  const auto k = detail::synthesize(s.coeffs(), s.radius(), plan);
  for (const auto& v : k) {
    if (!(v.real() > 0)) throw PositivityError("curvature is no longer positive on the evaluation grid");
  }
}

IntegrationOutcome integrate(const State& initial, const IntegratorOptions& opts, const IntegrationRequest& req) {
  opts.validate();
  DormandPrince stepper(req.rhs, opts);
  IntegrationOutcome out;
  out.samples.push_back(initial);

  std::vector<double> outputs;
  for (double t : req.output_times) {
    if (t > initial.time_stamp()) outputs.push_back(t);
  }
  std::sort(outputs.begin(), outputs.end());
  std::size_t next_output = 0;

  State s = initial;
  double dt = opts.dt_init;
  bool last_recorded = true;
  auto underflow = [&]() {
    if (req.stop_on_underflow) {
      out.underflow = true;
      return true;
    }
    throw StepUnderflowError("step size underflow (dt_next < dt_min) at t = " + std::to_string(s.time_stamp()));
  };

  while (true) {
    if (out.steps >= opts.max_steps) throw MaxStepsError("max_steps exceeded");
    const double t = s.time_stamp();
    double target = req.t_end;
    if (next_output < outputs.size()) target = std::min(target, outputs[next_output]);
    bool clipped = false;
    double h = dt;
    if (std::isfinite(target) && t + h >= target) {
      h = target - t;
      clipped = true;
    }
    auto res = stepper.attempt(s, h);
    if (!res.accepted) {
      ++out.rejected;
      dt = res.dt_next;
      if (dt < opts.dt_min && underflow()) break;
      continue;
    }
    ++out.steps;
    s = std::move(res.state);
    if (clipped) s.set_time_stamp(target);
    if (req.check) req.check(s);

    bool record = false;
    if (!outputs.empty()) {
      if (clipped && next_output < outputs.size() && target == outputs[next_output]) {
        record = true;
        ++next_output;
      }
    } else {
      record = out.steps % opts.sample_stride == 0;
    }
    if (record) out.samples.push_back(s);
    last_recorded = record;

    const bool done = (req.stop && req.stop(s)) || s.time_stamp() >= req.t_end ||
                      (!outputs.empty() && next_output == outputs.size());
    if (done) break;
    // A clipped step says nothing about the controller's preferred size.
    if (!clipped || res.dt_next < dt) dt = res.dt_next;
    if (dt < opts.dt_min && underflow()) break;
  }
  if (!last_recorded && req.output_times.empty()) out.samples.push_back(s);
  log::debug("integrate: " + std::to_string(out.steps) + " steps, " + std::to_string(out.rejected) + " rejected, " +
             std::to_string(stepper.rhs_evaluations()) + " rhs evaluations");
  return out;
}

std::pair<Trajectory, BlowupEstimate> integrate_to_blowup(const State& initial, const FlowParams& params,
                                                           const IntegratorOptions& opts_in,
                                                           std::optional<double> delta, std::optional<double> c_p) {
  params.validate();
  if (initial.radius() != params.N) throw DomainError("initial state radius does not match FlowParams.N");
  if (!(initial[0].real() > 0) || std::abs(initial[0].imag()) > 1e-14 * initial[0].real()) {
    throw DomainError("initial k(0) must be real and positive");
  }
  IntegratorOptions opts = opts_in;
  if (opts.blowup_cap == 0) opts.blowup_cap = default_blowup_cap(params.p, initial.mean());
  if (!(opts.blowup_cap > initial.mean())) throw ConfigError("blowup_cap must exceed the initial k(0)");

  Trajectory traj;
  traj.params = params;
  traj.domain = TimeDomain::physical_t;
  if (delta) {
    const auto d = check_delta_smallness(initial, *delta);
    if (!d.pass) {
      traj.warnings.push_back("initial data fails the delta-smallness check (worst mode " +
                              std::to_string(d.worst_mode) + ")");
    }
  }
  if (c_p) {
    const auto tr = check_trapping(initial, *c_p);
    if (!tr.pass) traj.warnings.push_back("initial data fails the trapping condition (margin " +
                                          std::to_string(tr.margin) + ")");
  }
  for (const auto& w : traj.warnings) log::warn(w);

  IntegrationRequest req;
  req.rhs = make_physical_rhs(params);
  const int p = params.p;
  req.check = [p](const State& s) { check_positive(s, p); };
  const double cap = opts.blowup_cap;
  req.stop = [cap](const State& s) { return s.mean() >= cap; };
  req.stop_on_underflow = true;

  auto outcome = integrate(initial, opts, req);
  traj.samples = std::move(outcome.samples);
  if (outcome.underflow) traj.warnings.push_back("stopped on step-size underflow before reaching the cap");
  traj.validate();
  auto est = estimate_T(traj, params);
  return {std::move(traj), est};
}

BlowupEstimate estimate_T(const Trajectory& traj, const FlowParams& params) {
  if (traj.domain != TimeDomain::physical_t) throw DomainError("estimate_T needs a physical-time trajectory");
  if (traj.samples.empty()) throw FitError("empty trajectory");
  const int p = params.p;
  const double k_init = traj.samples.front().mean();

  std::vector<std::size_t> grown;
  for (std::size_t i = 0; i < traj.samples.size(); ++i) {
    if (traj.samples[i].mean() >= 10 * k_init) grown.push_back(i);
  }
  const std::size_t want = std::max<std::size_t>(10, (traj.samples.size() + 4) / 5);
  if (grown.size() < 10) throw FitError("insufficient tail samples for blow-up time estimation");
  const std::size_t count = std::min(want, grown.size());
  const std::vector<std::size_t> tail(grown.end() - static_cast<std::ptrdiff_t>(count), grown.end());

  for (std::size_t i = 1; i < tail.size(); ++i) {
    if (traj.samples[tail[i]].mean() < traj.samples[tail[i - 1]].mean()) {
      throw FitError("k(0) is not monotone on the trajectory tail");
    }
  }

  const auto n = static_cast<Eigen::Index>(tail.size());
  Eigen::VectorXd t(n), y(n);
  const double coef = static_cast<double>(p) / (p + 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& s = traj.samples[tail[static_cast<std::size_t>(i)]];
    t[i] = s.time_stamp();
    y[i] = coef * std::pow(s.mean(), -(p + 1));
  }
  const double t_ref = t.mean();
  Eigen::MatrixXd design(n, 2);
  design.col(0) = t.array() - t_ref;
  design.col(1).setOnes();
  const Eigen::Vector2d beta = design.colPivHouseholderQr().solve(y);
  const double slope = beta[0];
  const double intercept = beta[1];
  if (!(slope < 0)) throw FitError("reciprocal-power fit has non-negative slope; no blow-up detected");

  const Eigen::VectorXd resid = y - design * beta;
  const double dof = std::max<double>(1, static_cast<double>(n) - 2);
  const double sigma2 = resid.squaredNorm() / dof;
  const Eigen::Matrix2d cov = sigma2 * (design.transpose() * design).inverse();

  BlowupEstimate est;
  est.T = t_ref - intercept / slope;
  // Delta method for T = t_ref - b/a.
  const Eigen::Vector2d grad(intercept / (slope * slope), -1.0 / slope);
  est.uncertainty = std::sqrt(std::max(0.0, grad.dot(cov * grad)));
  est.fit_window = {t[0], t[n - 1]};
  est.fit_residual = std::sqrt((resid.array() / y.array()).square().mean());
  est.fit_samples = tail.size();
  if (!(est.T > traj.samples.back().time_stamp())) {
    throw FitError("estimated blow-up time does not exceed the last sample time");
  }
  return est;
}

}  // namespace pcsf
