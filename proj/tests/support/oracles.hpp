// Independent reference implementations used only by the tests.  These are
// deliberately written as straight-line textbook formulas (long-double
// polynomial arithmetic, explicit nested loops) so they share no code with
// the library paths they check.
#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "dse/core.hpp"
#include "dse/matrix.hpp"
#include "dse/operator.hpp"

namespace oracle {

// Coefficients of the Legendre polynomial P_l, ascending powers, via
// (l+1) P_{l+1}(x) = (2l+1) x P_l(x) - l P_{l-1}(x).
inline std::vector<long double> legendre_coeffs(unsigned l) {
  std::vector<long double> pm1{1.0L};      // P_0
  if (l == 0) return pm1;
  std::vector<long double> p{0.0L, 1.0L};  // P_1
  for (unsigned k = 1; k < l; ++k) {
    std::vector<long double> next(k + 2, 0.0L);
    for (std::size_t i = 0; i < p.size(); ++i)
      next[i + 1] += (2.0L * k + 1.0L) * p[i] / (k + 1.0L);
    for (std::size_t i = 0; i < pm1.size(); ++i)
      next[i] -= static_cast<long double>(k) * pm1[i] / (k + 1.0L);
    pm1 = std::move(p);
    p = std::move(next);
  }
  return p;
}

inline std::vector<long double> differentiate(std::vector<long double> c,
                                              unsigned times) {
  for (unsigned t = 0; t < times; ++t) {
    if (c.size() <= 1) return {0.0L};
    std::vector<long double> d(c.size() - 1);
    for (std::size_t i = 1; i < c.size(); ++i)
      d[i - 1] = c[i] * static_cast<long double>(i);
    c = std::move(d);
  }
  return c;
}

inline long double eval_poly(const std::vector<long double>& c,
                             long double x) {
  long double acc = 0.0L;
  for (std::size_t i = c.size(); i > 0; --i) acc = acc * x + c[i - 1];
  return acc;
}

// Associated Legendre P_l^m(x) with the Condon-Shortley phase, from the
// Rodrigues form P_l^m = (-1)^m (1-x^2)^{m/2} d^m/dx^m P_l.
inline long double assoc_legendre(unsigned l, unsigned m, long double x) {
  const auto dm = differentiate(legendre_coeffs(l), m);
  const long double phase = (m % 2 == 0) ? 1.0L : -1.0L;
  return phase * std::pow(1.0L - x * x, 0.5L * m) * eval_poly(dm, x);
}

// Fully normalized spherical-harmonic value Y_l^m(theta, phi) with
// integral of |Y|^2 over the sphere equal to 1.
inline std::complex<double> sph_harmonic(unsigned l, int m, double theta,
                                         double phi) {
  if (m < 0) {
    const auto pos = sph_harmonic(l, -m, theta, phi);
    const double sign = ((-m) % 2 == 0) ? 1.0 : -1.0;
    return sign * std::conj(pos);
  }
  const unsigned mu = static_cast<unsigned>(m);
  long double den = 1.0L;  // (l+m)! / (l-m)!
  for (unsigned k = l > mu ? l - mu + 1 : 1; k <= l + mu; ++k)
    den *= static_cast<long double>(k);
  const long double norm =
      std::sqrt((2.0L * l + 1.0L) / (4.0L * 3.14159265358979323846264338327950288L) /
                den);
  const long double p = assoc_legendre(l, mu, std::cos((long double)theta));
  const double mag = static_cast<double>(norm * p);
  return {mag * std::cos(mu * phi), mag * std::sin(mu * phi)};
}

// Truncated transform of a 2-D field by explicit nested loops: flat mode
// index j = j0 + m * j1, axis-0 frequency varying fastest.
inline dse::CMat nested_dft_2d(const dse::RMat& coords, const dse::CMat& field,
                               std::size_t m, dse::FrequencyRange range,
                               double scale) {
  const std::size_t n = coords.rows;
  dse::CMat out(m * m, field.cols);
  for (std::size_t j1 = 0; j1 < m; ++j1)
    for (std::size_t j0 = 0; j0 < m; ++j0) {
      const auto f0 = static_cast<double>(
          dse::frequency_for_index(j0, m, range));
      const auto f1 = static_cast<double>(
          dse::frequency_for_index(j1, m, range));
      for (std::size_t c = 0; c < field.cols; ++c) {
        std::complex<double> acc{0.0, 0.0};
        for (std::size_t k = 0; k < n; ++k) {
          const double ang =
              -2.0 * 3.141592653589793238462643383279502884 *
              (f0 * coords(k, 0) + f1 * coords(k, 1));
          acc += field(k, c) * std::complex<double>(std::cos(ang),
                                                    std::sin(ang));
        }
        out(j0 + m * j1, c) = scale * acc;
      }
    }
  return out;
}

// Spectral layer forward pass as plain nested loops.
inline dse::RMat naive_layer_forward(const dse::SpectralLayerParams& p,
                                     const dse::RMat& x, const dse::CMat& v,
                                     dse::Activation act,
                                     bool apply_activation) {
  const std::size_t n = x.rows, ci_n = p.c_in, co_n = p.c_out,
                    m = v.rows;
  dse::RMat y(n, co_n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t co = 0; co < co_n; ++co) {
      double spectral = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        std::complex<double> h{0.0, 0.0};
        for (std::size_t ci = 0; ci < ci_n; ++ci) {
          std::complex<double> xc{0.0, 0.0};
          for (std::size_t k = 0; k < n; ++k) xc += v(j, k) * x(k, ci);
          h += p.R(j, ci * co_n + co) * xc;
        }
        spectral += (std::conj(v(j, i)) * h).real();
      }
      double affine = p.b[co];
      for (std::size_t ci = 0; ci < ci_n; ++ci)
        affine += x(i, ci) * p.W(ci, co);
      const double pre = spectral + affine;
      y(i, co) = apply_activation ? dse::activate(act, pre) : pre;
    }
  return y;
}

}  // namespace oracle
