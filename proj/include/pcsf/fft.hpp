#pragma once

#include <bit>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <vector>

#include "pcsf/errors.hpp"

namespace pcsf {

/// Iterative radix-2 complex FFT for power-of-two sizes.
///
/// Twiddle factors are tabulated once per plan with std::polar (no
/// recurrence), so a plan is immutable after construction and may be shared
/// between threads. The transform is unnormalized in both directions:
///   forward:  X_k = sum_j x_j e^{-2 pi i jk/M}
///   inverse:  x_j = sum_k X_k e^{+2 pi i jk/M}
template <typename Scalar>
class FftPlan {
 public:
  using Complex = std::complex<Scalar>;

  explicit FftPlan(int size) : size_(size) {
    if (size < 1 || !std::has_single_bit(static_cast<unsigned>(size))) {
      throw DomainError("FFT size must be a positive power of two");
    }
    twiddles_.resize(static_cast<std::size_t>(size / 2));
    const Scalar step = -2 * std::numbers::pi_v<Scalar> / static_cast<Scalar>(size);
    for (int k = 0; k < size / 2; ++k) {
      twiddles_[static_cast<std::size_t>(k)] = std::polar(Scalar(1), step * static_cast<Scalar>(k));
    }
    bit_reverse_.resize(static_cast<std::size_t>(size));
    const int bits = std::countr_zero(static_cast<unsigned>(size));
    for (int i = 0; i < size; ++i) {
      unsigned r = 0;
      for (int b = 0; b < bits; ++b) {
        if (i & (1 << b)) r |= 1u << (bits - 1 - b);
      }
      bit_reverse_[static_cast<std::size_t>(i)] = static_cast<int>(r);
    }
  }

  int size() const noexcept { return size_; }

  void forward(std::span<Complex> data) const { run(data, false); }
  void inverse(std::span<Complex> data) const { run(data, true); }

 private:
  void run(std::span<Complex> data, bool inverse) const {
    if (static_cast<int>(data.size()) != size_) {
      throw DomainError("FFT buffer length does not match plan size");
    }
    for (int i = 0; i < size_; ++i) {
      const int j = bit_reverse_[static_cast<std::size_t>(i)];
      if (i < j) std::swap(data[static_cast<std::size_t>(i)], data[static_cast<std::size_t>(j)]);
    }
    for (int len = 2; len <= size_; len <<= 1) {
      const int half = len / 2;
      const int stride = size_ / len;
      for (int start = 0; start < size_; start += len) {
        for (int k = 0; k < half; ++k) {
          Complex w = twiddles_[static_cast<std::size_t>(k * stride)];
          if (inverse) w = std::conj(w);
          Complex& a = data[static_cast<std::size_t>(start + k)];
          Complex& b = data[static_cast<std::size_t>(start + k + half)];
          const Complex t = w * b;
          b = a - t;
          a = a + t;
        }
      }
    }
  }

  int size_;
  std::vector<Complex> twiddles_;
  std::vector<int> bit_reverse_;
};

/// Smallest power of two that is >= n (n >= 1).
inline int next_power_of_two(int n) {
  return static_cast<int>(std::bit_ceil(static_cast<unsigned>(n < 1 ? 1 : n)));
}

}  // namespace pcsf
