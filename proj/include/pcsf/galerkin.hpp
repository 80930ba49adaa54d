#pragma once

// Right-hand side of the Fourier-Galerkin truncation of the curvature form
//   k_t = k^{p+1} k'' + (p-1) k^p (k')^2 + (1/p) k^{p+2},
// restricted to the mode set Z = {-N..N}.
//
// Two independent evaluators are provided:
//   * rhs_oracle sums H(p,q1,q2) k(q1)...k(q_{p+2}) over the index tuples of
//     B_n directly (linear part plus the A_n remainder). Cost O((2N+1)^{p+1})
//     per mode, intended for N <= 6.
//   * rhs_convolution forms the same multi-fold products as pointwise
//     products on a zero-padded grid large enough that no alias lands on Z.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "pcsf/errors.hpp"
#include "pcsf/fft.hpp"
#include "pcsf/spectral.hpp"

namespace pcsf {

enum class RhsMethod { oracle, convolution };

inline const char* to_string(RhsMethod m) { return m == RhsMethod::oracle ? "oracle" : "conv"; }

inline RhsMethod parse_rhs_method(const std::string& s) {
  if (s == "oracle") return RhsMethod::oracle;
  if (s == "conv" || s == "convolution") return RhsMethod::convolution;
  throw ConfigError("rhs method must be 'oracle' or 'conv', got '" + s + "'");
}

struct FlowParams {
  int p = 1;
  int N = 16;
  RhsMethod rhs_method = RhsMethod::convolution;

  void validate() const {
    if (p < 1) throw ConfigError("p must be ≥ 1");
    if (N < 1) throw ConfigError("N must be ≥ 1");
  }
  ModeSet modes() const { return ModeSet{N}; }
};

/// H(p, q1, q2) = 1/p - (p-1) q1 q2 - q1^2.
inline double coefficient_H(int p, long q1, long q2) {
  if (p < 1) throw DomainError("p must be ≥ 1");
  return 1.0 / p - static_cast<double>(p - 1) * static_cast<double>(q1) * static_cast<double>(q2) -
         static_cast<double>(q1) * static_cast<double>(q1);
}

using IndexTuple = std::vector<int>;
using TupleWeight = std::function<double(int p, long q1, long q2)>;

enum class TupleSet { B, A, C };

/// Membership filter of A_n (>= 2 nonzero entries) and C_n (A_n with every
/// entry outside {0, +1, -1}) applied to a tuple already in B_n.
inline bool tuple_in(TupleSet set, const IndexTuple& q) {
  switch (set) {
    case TupleSet::B:
      return true;
    case TupleSet::A:
      return std::count_if(q.begin(), q.end(), [](int v) { return v != 0; }) >= 2;
    case TupleSet::C:
      return tuple_in(TupleSet::A, q) && std::all_of(q.begin(), q.end(), [](int v) { return std::abs(v) > 1; });
  }
  return false;
}

/// Visits every (q1..q_{p+2}) in Z^{p+2} with q_{p+2} = n - q1 - ... - q_{p+1}
/// (tuples whose forced last entry leaves Z are skipped) that belongs to the
/// requested set. The visitor receives a reference to a reused buffer.
template <typename Visitor>
void for_each_tuple(TupleSet set, int n, ModeSet modes, int p, Visitor&& visit) {
  if (p < 1) throw DomainError("p must be ≥ 1");
  const int free_slots = p + 1;
  const int r = modes.radius;
  IndexTuple q(static_cast<std::size_t>(p + 2), -r);
  // Odometer over the p+1 free entries.
  while (true) {
    long partial = 0;
    for (int j = 0; j < free_slots; ++j) partial += q[static_cast<std::size_t>(j)];
    const long last = static_cast<long>(n) - partial;
    if (last >= -r && last <= r) {
      q[static_cast<std::size_t>(free_slots)] = static_cast<int>(last);
      if (tuple_in(set, q)) visit(static_cast<const IndexTuple&>(q));
    }
    int j = 0;
    while (j < free_slots && q[static_cast<std::size_t>(j)] == r) {
      q[static_cast<std::size_t>(j)] = -r;
      ++j;
    }
    if (j == free_slots) break;
    ++q[static_cast<std::size_t>(j)];
  }
}

inline std::vector<IndexTuple> enumerate_tuples(TupleSet set, int n, ModeSet modes, int p) {
  std::vector<IndexTuple> out;
  for_each_tuple(set, n, modes, p, [&](const IndexTuple& q) { out.push_back(q); });
  return out;
}
inline std::vector<IndexTuple> enumerate_Bn(int n, ModeSet modes, int p) {
  return enumerate_tuples(TupleSet::B, n, modes, p);
}
inline std::vector<IndexTuple> enumerate_An(int n, ModeSet modes, int p) {
  return enumerate_tuples(TupleSet::A, n, modes, p);
}
inline std::vector<IndexTuple> enumerate_Cn(int n, ModeSet modes, int p) {
  return enumerate_tuples(TupleSet::C, n, modes, p);
}

/// The part of the right side produced by tuples of B_n with at most one
/// nonzero entry: ((p+2)/p - n^2) k(0)^{p+1} k(n), or k(0)^{p+2}/p at n = 0.
template <typename Scalar>
std::complex<Scalar> linear_term(const FourierState<Scalar>& s, int p, int n) {
  const auto k0 = s[0];
  std::complex<Scalar> k0_p1(1);
  for (int e = 0; e < p + 1; ++e) k0_p1 *= k0;
  if (n == 0) return k0_p1 * k0 / static_cast<Scalar>(p);
  const Scalar factor =
      static_cast<Scalar>(p + 2) / static_cast<Scalar>(p) - static_cast<Scalar>(n) * static_cast<Scalar>(n);
  return factor * k0_p1 * s[n];
}

/// Direct summation of the truncated Fourier system. `weight` defaults to H
/// and is exposed so that verification can inject a corrupted kernel.
template <typename Scalar>
FourierState<Scalar> rhs_oracle(const FourierState<Scalar>& s, const FlowParams& params,
                                const TupleWeight& weight = coefficient_H) {
  if (s.radius() != params.N) throw DomainError("state radius does not match FlowParams.N");
  FourierState<Scalar> out(s.modes(), s.time_stamp());
  const int p = params.p;
  for (int n = -params.N; n <= params.N; ++n) {
    std::complex<Scalar> acc(0);
    for_each_tuple(TupleSet::A, n, s.modes(), p, [&](const IndexTuple& q) {
      std::complex<Scalar> prod = s[q[0]];
      for (std::size_t j = 1; j < q.size(); ++j) prod *= s[q[j]];
      acc += static_cast<Scalar>(weight(p, q[0], q[1])) * prod;
    });
    out[n] = linear_term(s, p, n) + acc;
  }
  return out;
}

/// Coefficients of a field a k^{p+1} k'' + b k^p (k')^2 + c k^{p+2} + d k,
/// all evaluated as grid products.
template <typename Scalar>
struct ProductFlux {
  Scalar second_derivative = 1;
  Scalar gradient_squared = 0;
  Scalar power = 0;
  Scalar linear = 0;

  /// The physical curvature flow.
  static ProductFlux physical(int p) {
    return {1, static_cast<Scalar>(p - 1), Scalar(1) / static_cast<Scalar>(p), 0};
  }
};

/// Pseudo-spectral evaluator of a ProductFlux. Grid size is the smallest
/// power of two >= (p+2)(2N+1), so every (p+2)-fold product of radius-N
/// factors is resolved without aliasing onto the retained modes.
template <typename Scalar>
class ConvolutionRhs {
 public:
  using Complex = std::complex<Scalar>;

  ConvolutionRhs(int p, ModeSet modes, ProductFlux<Scalar> flux)
      : p_(p), modes_(modes), flux_(flux), plan_(dealiased_grid_size(p, modes.radius)) {
    if (p < 1) throw DomainError("p must be ≥ 1");
  }
  ConvolutionRhs(const FlowParams& params)
      : ConvolutionRhs(params.p, params.modes(), ProductFlux<Scalar>::physical(params.p)) {}

  static int dealiased_grid_size(int p, int radius) { return next_power_of_two((p + 2) * (2 * radius + 1)); }

  int grid_size() const noexcept { return plan_.size(); }

  /// Evaluates the flux; if `min_real` is non-null it receives the smallest
  /// real part of k on the padded grid.
  FourierState<Scalar> operator()(const FourierState<Scalar>& s, Scalar* min_real = nullptr) const {
    if (s.modes() != modes_) throw DomainError("state radius does not match the evaluator");
    const int r = modes_.radius;
    const auto k = detail::synthesize(s.coeffs(), r, plan_);
    std::vector<Complex> k1, k2;
    const bool need_first = flux_.gradient_squared != Scalar(0);
    const bool need_second = flux_.second_derivative != Scalar(0);
    if (need_first) k1 = detail::synthesize(derivative(s, 1).coeffs(), r, plan_);
    if (need_second) k2 = detail::synthesize(derivative(s, 2).coeffs(), r, plan_);

    const int m = plan_.size();
    std::vector<Complex> g(static_cast<std::size_t>(m));
    Scalar lowest = std::numeric_limits<Scalar>::infinity();
    for (int j = 0; j < m; ++j) {
      const auto idx = static_cast<std::size_t>(j);
      const Complex kj = k[idx];
      lowest = std::min(lowest, kj.real());
      Complex kp = Complex(1);  // k^p
      for (int e = 0; e < p_; ++e) kp *= kj;
      const Complex kp1 = kp * kj;
      Complex v = flux_.power * kp1 * kj + flux_.linear * kj;
      if (need_second) v += flux_.second_derivative * kp1 * k2[idx];
      if (need_first) v += flux_.gradient_squared * kp * k1[idx] * k1[idx];
      g[idx] = v;
    }
    if (min_real) *min_real = lowest;
    return FourierState<Scalar>(modes_, detail::analyze(std::move(g), r, plan_), s.time_stamp());
  }

 private:
  int p_;
  ModeSet modes_;
  ProductFlux<Scalar> flux_;
  FftPlan<Scalar> plan_;
};

template <typename Scalar>
FourierState<Scalar> rhs_convolution(const FourierState<Scalar>& s, const FlowParams& params) {
  if (s.radius() != params.N) throw DomainError("state radius does not match FlowParams.N");
  return ConvolutionRhs<Scalar>(params)(s);
}

/// Dispatches on params.rhs_method.
template <typename Scalar>
FourierState<Scalar> rhs(const FourierState<Scalar>& s, const FlowParams& params) {
  return params.rhs_method == RhsMethod::oracle ? rhs_oracle(s, params) : rhs_convolution(s, params);
}

template <typename Scalar>
struct RhsSplit {
  FourierState<Scalar> linear;
  FourierState<Scalar> nonlinear;
};

template <typename Scalar>
RhsSplit<Scalar> rhs_split(const FourierState<Scalar>& s, const FlowParams& params) {
  const auto total = rhs(s, params);
  FourierState<Scalar> lin(s.modes(), s.time_stamp());
  for (int n = -params.N; n <= params.N; ++n) lin[n] = linear_term(s, params.p, n);
  FourierState<Scalar> nonlin = total;
  nonlin.coeffs() -= lin.coeffs();
  return {std::move(lin), std::move(nonlin)};
}

/// Checks that, for every n in Z, B_n splits into the tuples with at most one
/// nonzero entry and A_n, and that the former reproduce the linear
/// coefficient ((p+2)/p - n^2), resp. 1/p at n = 0.
inline bool linear_decomposition_holds(int p, ModeSet modes) {
  for (int n = -modes.radius; n <= modes.radius; ++n) {
    std::size_t b = 0, a = 0;
    double linear_weight = 0;
    bool ok = true;
    for_each_tuple(TupleSet::B, n, modes, p, [&](const IndexTuple& q) {
      ++b;
      if (tuple_in(TupleSet::A, q)) {
        ++a;
        return;
      }
      // At most one nonzero entry, necessarily equal to n.
      for (int v : q) ok = ok && (v == 0 || v == n);
      linear_weight += coefficient_H(p, q[0], q[1]);
    });
    const std::size_t expected_linear = n == 0 ? 1u : static_cast<std::size_t>(p + 2);
    const double expected_weight = n == 0 ? 1.0 / p : (p + 2.0) / p - static_cast<double>(n) * n;
    if (!ok || b - a != expected_linear || std::abs(linear_weight - expected_weight) > 1e-12) return false;
  }
  return true;
}

}  // namespace pcsf
