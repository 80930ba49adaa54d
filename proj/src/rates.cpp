#include "pcsf/rates.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace pcsf {

namespace {

struct LineFit {
  double slope = 0;
  double intercept = 0;
  double rms = 0;
};

LineFit least_squares_line(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  const auto n = x.size();
  Eigen::MatrixXd design(n, 2);
  const double x_ref = x.mean();
  design.col(0) = x.array() - x_ref;
  design.col(1).setOnes();
  const Eigen::Vector2d beta = design.colPivHouseholderQr().solve(y);
  LineFit f;
  f.slope = beta[0];
  f.intercept = beta[1] - beta[0] * x_ref;
  f.rms = std::sqrt((y - design * beta).squaredNorm() / static_cast<double>(n));
  return f;
}

void require_points(std::span<const SamplePoint> points) {
  if (points.size() < 8) throw FitError("fit needs at least 8 points");
  for (const auto& [x, y] : points) {
    if (!(y > 0)) throw FitError("fit needs strictly positive values");
  }
}

}  // namespace

double alpha(int n, int p) {
  if (p < 1) throw DomainError("p must be ≥ 1");
  return (static_cast<double>(n) * n - (p + 2.0) / p) * p / (p + 1.0);
}

PredictedRates predicted_rates(int p) {
  if (p < 1) throw DomainError("p must be ≥ 1");
  PredictedRates r;
  r.p = p;
  r.mode_decay = (3.0 * p - 2) / (p + 1);
  r.convergence_rate = 3.0 * p - 1;
  r.blowup_exponent = 1.0 / (p + 1);
  r.mean_offset_rate = 6.0 * p - 2;
  return r;
}

PowerLawFit fit_power_law(std::span<const SamplePoint> points, double T) {
  require_points(points);
  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::VectorXd x(n), y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& [t, v] = points[static_cast<std::size_t>(i)];
    if (!(t < T)) throw FitError("power-law fit needs t < T");
    x[i] = std::log(T - t);
    y[i] = std::log(v);
  }
  if ((x.maxCoeff() - x.minCoeff()) / std::log(10.0) < 1.0) {
    throw FitError("power-law fit needs T - t to span at least one decade");
  }
  const auto f = least_squares_line(x, y);
  return {f.slope, std::exp(f.intercept), f.rms, points.size()};
}

ExponentialFit fit_exponential(std::span<const SamplePoint> points) {
  require_points(points);
  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::VectorXd x(n), y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    x[i] = points[static_cast<std::size_t>(i)].first;
    y[i] = std::log(points[static_cast<std::size_t>(i)].second);
  }
  if (!(x.maxCoeff() > x.minCoeff())) throw FitError("exponential fit needs distinct abscissae");
  const auto f = least_squares_line(x, y);
  return {-f.slope, std::exp(f.intercept), f.rms, points.size()};
}

TrappingCheck check_trapping(const State& psi, double c_p) {
  const double bound = c_p * seminorm(psi, 2.0);
  return {psi.mean() >= bound, psi.mean() - bound};
}

SmallnessCheck check_delta_smallness(const State& psi, double delta) {
  SmallnessCheck out;
  const double k0 = psi.mean();
  if (!(k0 > 0)) throw DomainError("smallness check needs psi(0) > 0");
  for (int q = -psi.radius(); q <= psi.radius(); ++q) {
    if (q == 0) continue;
    const double w = static_cast<double>(q) * q;
    const double ratio = w * std::abs(psi[q]) / k0;
    const double comp = w * std::max(std::abs(psi[q].real()), std::abs(psi[q].imag())) / k0;
    out.worst_ratio_componentwise = std::max(out.worst_ratio_componentwise, comp);
    if (ratio > out.worst_ratio) {
      out.worst_ratio = ratio;
      out.worst_mode = std::abs(q);
    }
  }
  out.pass = out.worst_ratio <= delta;
  return out;
}

const char* to_string(RateKind k) { return k == RateKind::equality ? "equality" : "lower_bound"; }

void RateReport::decide() {
  if (kind == RateKind::equality) {
    pass = std::abs(fitted - predicted) <= tolerance;
  } else {
    pass = fitted >= predicted - tolerance;
  }
}

std::pair<std::size_t, std::size_t> tail_window(std::size_t sample_count) {
  const std::size_t lo = sample_count / 5;
  const std::size_t hi = sample_count > 0 ? sample_count - 1 : 0;  // drop the sample at the cap
  return {lo, std::max(lo, hi)};
}

std::vector<RateReport> mode_decay_report(const Trajectory& traj, double T, const FlowParams& params,
                                          const RateTolerances& tol) {
  const auto rates = predicted_rates(params.p);
  const auto [lo, hi] = tail_window(traj.samples.size());
  if (hi <= lo) throw FitError("trajectory too short for a tail fit");
  const double span = std::log10((T - traj.samples[lo].time_stamp()) / (T - traj.samples[hi - 1].time_stamp()));
  if (!(span >= 2.0)) throw FitError("trajectory tail spans fewer than two decades of T - t");

  std::vector<RateReport> out;
  const int top = std::min(params.N, 4);
  for (int n = 0; n <= top; ++n) {
    std::vector<SamplePoint> pts;
    for (std::size_t i = lo; i < hi; ++i) {
      const auto& s = traj.samples[i];
      const double amp = std::abs(s.at(n));
      if (amp >= kModeFloor) pts.emplace_back(s.time_stamp(), amp);
    }
    if (pts.size() < 8) continue;
    PowerLawFit f;
    try {
      f = fit_power_law(pts, T);
    } catch (const FitError&) {
      continue;
    }
    RateReport r;
    r.fitted = f.exponent;
    r.rms_residual = f.rms_residual;
    r.window = {pts.front().first, pts.back().first};
    r.points = pts.size();
    if (n == 0) {
      r.quantity = "blowup";
      r.predicted = -rates.blowup_exponent;
      r.tolerance = tol.blowup;
      r.kind = RateKind::equality;
    } else {
      r.quantity = "mode" + std::to_string(n) + "_decay";
      r.predicted = rates.mode_decay;
      r.tolerance = tol.mode_decay * rates.mode_decay;
      r.kind = n == 2 ? RateKind::equality : RateKind::lower_bound;
    }
    r.decide();
    out.push_back(std::move(r));
  }
  return out;
}

int distance_grid_size(int radius) { return std::max(1024, next_power_of_two(8 * radius + 8)); }

RateReport convergence_report(const Trajectory& normalized, int order, double tau_lo, double tau_hi,
                              const FlowParams& params, const RateTolerances& tol) {
  if (normalized.domain != TimeDomain::normalized_tau) throw DomainError("convergence fit needs a tau trajectory");
  const auto rates = predicted_rates(params.p);
  std::vector<SamplePoint> pts;
  const int m = distance_grid_size(params.N);
  for (const auto& s : normalized.samples) {
    const double tau = s.time_stamp();
    if (tau < tau_lo || tau > tau_hi) continue;
    pts.emplace_back(tau, cl_distance(s, 1.0, order, m));
  }
  const auto f = fit_exponential(pts);
  RateReport r;
  r.quantity = "convergence_C" + std::to_string(order);
  r.fitted = f.rate;
  r.predicted = rates.convergence_rate;
  r.tolerance = tol.convergence * rates.convergence_rate;
  r.kind = RateKind::equality;
  r.window = {pts.front().first, pts.back().first};
  r.rms_residual = f.rms_residual;
  r.points = pts.size();
  r.decide();
  return r;
}

RateReport mean_offset_report(const Trajectory& normalized, double tau_lo, double tau_hi, const FlowParams& params,
                              const RateTolerances& tol, double floor) {
  if (normalized.domain != TimeDomain::normalized_tau) throw DomainError("mean-offset fit needs a tau trajectory");
  const auto rates = predicted_rates(params.p);
  std::vector<SamplePoint> pts;
  for (const auto& s : normalized.samples) {
    const double tau = s.time_stamp();
    if (tau < tau_lo || tau > tau_hi) continue;
    const double offset = std::abs(s.mean() - 1.0);
    // The offset decays monotonically until it meets the roundoff floor.
    if (offset < floor) break;
    pts.emplace_back(tau, offset);
  }
  const auto f = fit_exponential(pts);
  RateReport r;
  r.quantity = "mean_offset";
  r.fitted = f.rate;
  r.predicted = rates.mean_offset_rate;
  // fitted >= factor * (3p-1), expressed as a lower bound on 6p-2.
  r.tolerance = rates.mean_offset_rate - tol.mean_offset_factor * rates.convergence_rate;
  r.kind = RateKind::lower_bound;
  r.window = {pts.front().first, pts.back().first};
  r.rms_residual = f.rms_residual;
  r.points = pts.size();
  r.decide();
  return r;
}

}  // namespace pcsf
