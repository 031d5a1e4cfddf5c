#pragma once

// Reference radix-2 FFT and literal DFT.  These are the ground-truth and
// baseline transforms: the FFT is an iterative in-place decimation-in-time
// radix-2 with a precomputed twiddle table, the naive DFT is the O(N^2)
// double loop it is checked against.  Both use the unnormalized forward
// convention  X_k = sum_n x_n exp(-2*pi*i*k*n/N).

#include <complex>
#include <cstddef>
#include <vector>

#include "dse/common.hpp"
#include "dse/matrix.hpp"

namespace dse {

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// In-order forward DFT of a power-of-two-length signal.
inline std::vector<Complex> fft_radix2(std::vector<Complex> x) {
  const std::size_t n = x.size();
  if (!is_power_of_two(n))
    throw SizeError("fft_radix2: length " + std::to_string(n) +
                    " is not a power of two");
  if (n == 1) return x;

  // Bit-reversal permutation brings the input into the order the iterative
  // butterfly stages consume.
  for (std::size_t i = 1, rev = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; rev & bit; bit >>= 1) rev ^= bit;
    rev ^= bit;
    if (i < rev) std::swap(x[i], x[rev]);
  }

  // Twiddle table tw[k] = exp(-2*pi*i*k/N), k < N/2.
  std::vector<Complex> tw(n / 2);
  for (std::size_t k = 0; k < n / 2; ++k) {
    const double ang = -kTwoPi * static_cast<double>(k) / static_cast<double>(n);
    tw[k] = Complex(std::cos(ang), std::sin(ang));
  }

  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t step = n / len;
    for (std::size_t base = 0; base < n; base += len) {
      for (std::size_t k = 0; k < len / 2; ++k) {
        const Complex w = tw[k * step];
        const Complex even = x[base + k];
        const Complex odd = w * x[base + k + len / 2];
        x[base + k] = even + odd;
        x[base + k + len / 2] = even - odd;
      }
    }
  }
  return x;
}

// Literal double-loop DFT, any length.  Real and imaginary parts are
// accumulated separately from cos/sin so this path shares no arithmetic with
// the FFT or the matrix builders it serves as an oracle for.
inline std::vector<Complex> dft_naive(const std::vector<Complex>& x) {
  const std::size_t n = x.size();
  if (n == 0) throw SizeError("dft_naive: empty signal");
  std::vector<Complex> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    double re = 0.0, im = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      const double ang = -kTwoPi * static_cast<double>(k) *
                         static_cast<double>(t) / static_cast<double>(n);
      const double c = std::cos(ang);
      const double s = std::sin(ang);
      re += x[t].real() * c - x[t].imag() * s;
      im += x[t].real() * s + x[t].imag() * c;
    }
    out[k] = Complex(re, im);
  }
  return out;
}

// First m entries of the radix-2 FFT: the truncated-FFT comparator.
inline std::vector<Complex> fft_truncated(const std::vector<Complex>& x,
                                          std::size_t m) {
  if (m > x.size())
    throw SizeError("fft_truncated: m=" + std::to_string(m) +
                    " exceeds signal length " + std::to_string(x.size()));
  std::vector<Complex> full = fft_radix2(x);
  full.resize(m);
  return full;
}

}  // namespace dse
