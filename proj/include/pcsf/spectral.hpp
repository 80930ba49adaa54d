#pragma once

// Fourier representation of 2pi-periodic real functions on a symmetric mode
// set {-N..N}: transforms, seminorms, the C^l distance and the convexity
// functional Q(k) = int e^{i theta} / k(theta) d theta.

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "pcsf/errors.hpp"
#include "pcsf/fft.hpp"

namespace pcsf {

template <typename Scalar>
using CoeffVector = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;

template <typename Scalar>
using RealVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// The symmetric integer interval {-radius, ..., radius}.
struct ModeSet {
  int radius = 0;

  int size() const noexcept { return 2 * radius + 1; }
  bool contains(int n) const noexcept { return n >= -radius && n <= radius; }
  /// Storage slot of mode n (modes are stored in order -N..N).
  int index(int n) const noexcept { return n + radius; }

  std::vector<int> members() const {
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(size()));
    for (int n = -radius; n <= radius; ++n) out.push_back(n);
    return out;
  }

  friend bool operator==(const ModeSet&, const ModeSet&) = default;
};

inline ModeSet make_mode_set(int radius) {
  if (radius < 0) throw DomainError("mode set radius must be non-negative");
  return ModeSet{radius};
}

/// Fourier coefficients k^(n), n in -N..N, stamped with a flow time.
template <typename Scalar = double>
class FourierState {
 public:
  using Complex = std::complex<Scalar>;

  FourierState() : FourierState(ModeSet{0}) {}
  explicit FourierState(ModeSet modes, Scalar time_stamp = 0)
      : modes_(modes), coeffs_(CoeffVector<Scalar>::Zero(modes.size())), time_stamp_(time_stamp) {}
  FourierState(ModeSet modes, CoeffVector<Scalar> coeffs, Scalar time_stamp = 0)
      : modes_(modes), coeffs_(std::move(coeffs)), time_stamp_(time_stamp) {
    if (coeffs_.size() != modes_.size()) {
      throw DomainError("coefficient vector length does not match the mode set");
    }
  }

  static FourierState constant(ModeSet modes, Scalar value, Scalar time_stamp = 0) {
    FourierState s(modes, time_stamp);
    s[0] = value;
    return s;
  }

  const ModeSet& modes() const noexcept { return modes_; }
  int radius() const noexcept { return modes_.radius; }

  Complex& operator[](int n) { return coeffs_[modes_.index(n)]; }
  const Complex& operator[](int n) const { return coeffs_[modes_.index(n)]; }

  /// Mode n, or zero when n lies outside the mode set.
  Complex at(int n) const { return modes_.contains(n) ? (*this)[n] : Complex(0); }

  /// Sets mode n and its mirror so that the reality condition holds.
  void set_real_pair(int n, Complex value) {
    if (n == 0) {
      (*this)[0] = Complex(value.real(), 0);
    } else {
      (*this)[n] = value;
      (*this)[-n] = std::conj(value);
    }
  }

  const CoeffVector<Scalar>& coeffs() const noexcept { return coeffs_; }
  CoeffVector<Scalar>& coeffs() noexcept { return coeffs_; }

  Scalar time_stamp() const noexcept { return time_stamp_; }
  void set_time_stamp(Scalar t) noexcept { time_stamp_ = t; }

  Scalar mean() const { return (*this)[0].real(); }
  Scalar max_modulus() const { return coeffs_.size() ? coeffs_.cwiseAbs().maxCoeff() : Scalar(0); }

 private:
  ModeSet modes_;
  CoeffVector<Scalar> coeffs_;
  Scalar time_stamp_ = 0;
};

/// Samples g(theta_j), theta_j = 2 pi j / M.
template <typename Scalar = double>
struct GridFunction {
  RealVector<Scalar> samples;
  int grid_size() const noexcept { return static_cast<int>(samples.size()); }

  static GridFunction from(int grid_size, auto&& fn) {
    GridFunction g;
    g.samples.resize(grid_size);
    for (int j = 0; j < grid_size; ++j) g.samples[j] = fn(grid_angle<Scalar>(j, grid_size));
    return g;
  }

  template <typename S>
  static S grid_angle(int j, int grid_size) {
    return 2 * std::numbers::pi_v<S> * static_cast<S>(j) / static_cast<S>(grid_size);
  }
};

/// max over n of |k(-n) - conj k(n)|, including |Im k(0)|.
template <typename Scalar>
Scalar reality_defect(const FourierState<Scalar>& s) {
  Scalar worst = std::abs(s[0].imag());
  for (int n = 1; n <= s.radius(); ++n) worst = std::max(worst, std::abs(s[-n] - std::conj(s[n])));
  return worst;
}

/// Average each coefficient with the conjugate of its mirror.
template <typename Scalar>
void symmetrize(FourierState<Scalar>& s) {
  s[0] = std::complex<Scalar>(s[0].real(), 0);
  for (int n = 1; n <= s.radius(); ++n) {
    const auto avg = (s[n] + std::conj(s[-n])) / Scalar(2);
    s[n] = avg;
    s[-n] = std::conj(avg);
  }
}

/// Coefficients (i n)^order k(n): the order-th theta derivative.
template <typename Scalar>
FourierState<Scalar> derivative(const FourierState<Scalar>& s, int order) {
  FourierState<Scalar> out = s;
  for (int n = -s.radius(); n <= s.radius(); ++n) {
    out[n] = s[n] * std::pow(std::complex<Scalar>(0, static_cast<Scalar>(n)), order);
  }
  return out;
}

namespace detail {

/// Complex grid values sum_n c(n) e^{i n theta_j} for a coefficient vector
/// stored over -R..R; M must exceed 2R.
template <typename Scalar>
std::vector<std::complex<Scalar>> synthesize(const CoeffVector<Scalar>& coeffs, int radius,
                                             const FftPlan<Scalar>& plan) {
  const int m = plan.size();
  std::vector<std::complex<Scalar>> buf(static_cast<std::size_t>(m), std::complex<Scalar>(0));
  for (int n = -radius; n <= radius; ++n) {
    buf[static_cast<std::size_t>((n % m + m) % m)] += coeffs[n + radius];
  }
  plan.inverse(buf);
  return buf;
}

/// Coefficients over -R..R of real grid samples; M must exceed 2R.
template <typename Scalar>
CoeffVector<Scalar> analyze(std::vector<std::complex<Scalar>> buf, int radius, const FftPlan<Scalar>& plan) {
  const int m = plan.size();
  plan.forward(buf);
  CoeffVector<Scalar> out(2 * radius + 1);
  const Scalar inv_m = Scalar(1) / static_cast<Scalar>(m);
  for (int n = -radius; n <= radius; ++n) {
    out[n + radius] = buf[static_cast<std::size_t>((n % m + m) % m)] * inv_m;
  }
  return out;
}

template <typename Scalar>
void check_grid(int grid_size, int radius, int factor, int offset, const char* what) {
  if (grid_size < factor * radius + offset) throw DomainError(what);
  if (!std::has_single_bit(static_cast<unsigned>(grid_size))) {
    throw DomainError("grid size must be a power of two");
  }
}

}  // namespace detail

/// Discrete Fourier coefficients of g restricted to Z. Exact for
/// trigonometric polynomials of degree <= N when M >= 2N+2.
template <typename Scalar>
FourierState<Scalar> forward_transform(const GridFunction<Scalar>& g, ModeSet modes) {
  detail::check_grid<Scalar>(g.grid_size(), modes.radius, 2, 2, "grid too small for requested mode radius");
  const FftPlan<Scalar> plan(g.grid_size());
  std::vector<std::complex<Scalar>> buf(static_cast<std::size_t>(g.grid_size()));
  for (int j = 0; j < g.grid_size(); ++j) buf[static_cast<std::size_t>(j)] = g.samples[j];
  FourierState<Scalar> s(modes, detail::analyze(std::move(buf), modes.radius, plan));
  symmetrize(s);
  return s;
}

/// Samples of sum_n k(n) e^{i n theta_j}. The imaginary residue must stay
/// below 1e-12 relative to the largest coefficient modulus.
template <typename Scalar>
GridFunction<Scalar> evaluate(const FourierState<Scalar>& s, int grid_size) {
  detail::check_grid<Scalar>(grid_size, s.radius(), 2, 2, "grid too small for the state's mode radius");
  const FftPlan<Scalar> plan(grid_size);
  const auto buf = detail::synthesize(s.coeffs(), s.radius(), plan);
  const Scalar tol = Scalar(1e-12) * std::max(s.max_modulus(), std::numeric_limits<Scalar>::min());
  GridFunction<Scalar> g;
  g.samples.resize(grid_size);
  for (int j = 0; j < grid_size; ++j) {
    const auto& v = buf[static_cast<std::size_t>(j)];
    if (std::abs(v.imag()) > tol) throw DomainError("state violates the reality condition");
    g.samples[j] = v.real();
  }
  return g;
}

/// ||f||_beta = max over xi of |xi|^beta max(|Re f(xi)|, |Im f(xi)|), with
/// |0|^beta taken as 0 for beta > 0 and 1 for beta = 0.
template <typename Scalar>
Scalar seminorm(const FourierState<Scalar>& s, Scalar beta) {
  Scalar worst = 0;
  for (int n = -s.radius(); n <= s.radius(); ++n) {
    Scalar weight;
    if (n == 0) {
      weight = beta > 0 ? Scalar(0) : Scalar(1);
    } else {
      weight = std::pow(static_cast<Scalar>(std::abs(n)), beta);
    }
    worst = std::max(worst, weight * std::max(std::abs(s[n].real()), std::abs(s[n].imag())));
  }
  return worst;
}

/// Trapezoidal quadrature of e^{i theta} / k(theta) on M uniform points.
template <typename Scalar>
std::complex<Scalar> convexity_functional_Q(const FourierState<Scalar>& s, int grid_size) {
  const auto k = evaluate(s, grid_size);
  std::complex<Scalar> acc(0);
  for (int j = 0; j < grid_size; ++j) {
    if (!(k.samples[j] > 0)) {
      throw PositivityError("non-positive curvature sample in Q evaluation");
    }
    const Scalar theta = GridFunction<Scalar>::template grid_angle<Scalar>(j, grid_size);
    acc += std::polar(Scalar(1), theta) / k.samples[j];
  }
  return acc * (2 * std::numbers::pi_v<Scalar> / static_cast<Scalar>(grid_size));
}

/// max over j <= l of sup_grid |d^j/dtheta^j (s - reference)|.
template <typename Scalar>
Scalar cl_distance(const FourierState<Scalar>& s, Scalar reference, int order, int grid_size) {
  if (order < 0) throw DomainError("derivative order must be non-negative");
  detail::check_grid<Scalar>(grid_size, s.radius(), 4, 0, "C^l distance needs grid_size >= 4N");
  if (reality_defect(s) > Scalar(1e-12) * s.max_modulus()) {
    throw DomainError("state violates the reality condition");
  }
  FourierState<Scalar> shifted = s;
  symmetrize(shifted);
  shifted[0] -= reference;
  Scalar worst = 0;
  for (int j = 0; j <= order; ++j) {
    const auto g = evaluate(derivative(shifted, j), grid_size);
    worst = std::max(worst, g.samples.cwiseAbs().maxCoeff());
  }
  return worst;
}

}  // namespace pcsf
