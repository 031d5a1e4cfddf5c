#pragma once

// Deterministic generators for the point distributions and synthetic
// band-limited fields used in tests, training, and benchmarks.  Every
// generator is a pure function of its arguments; the random ones draw from
// SplitMix64 in a documented order so other implementations can reproduce
// identical data bit for bit.

#include <cmath>
#include <utility>
#include <vector>

#include "dse/common.hpp"
#include "dse/core.hpp"

namespace dse {

inline PointSet points_from_coords_1d(const std::vector<double>& coords) {
  PointSet ps;
  ps.coords = RMat(coords.size(), 1);
  for (std::size_t i = 0; i < coords.size(); ++i) ps.coords(i, 0) = coords[i];
  return ps;
}

// p_n = n / N, the transform-friendly reference grid.
inline PointSet gen_equispaced_1d(std::size_t n) {
  if (n < 1) throw ConfigError("gen_equispaced_1d requires N >= 1");
  PointSet ps;
  ps.coords = RMat(n, 1);
  for (std::size_t i = 0; i < n; ++i)
    ps.coords(i, 0) = static_cast<double>(i) / static_cast<double>(n);
  return ps;
}

// Gaps grow geometrically by `ratio` outward from the point nearest `center`
// on both sides; the whole set is then rescaled affinely onto [0,1].  The
// minimum gap sits next to the center, the maximum at the domain edge.
inline PointSet gen_contracting_expanding_1d(std::size_t n, double center,
                                             double ratio) {
  if (n < 3) throw ConfigError("gen_contracting_expanding_1d requires N >= 3");
  if (!(center >= 0.0 && center <= 1.0))
    throw ConfigError("center must lie in [0,1]");
  if (!(ratio > 1.0))
    throw ConfigError("growth ratio must exceed 1");

  const auto center_index = static_cast<std::size_t>(
      std::llround(static_cast<double>(n - 1) * center));
  std::vector<double> pos(n, 0.0);
  double gap = 1.0;
  for (std::size_t i = center_index + 1; i < n; ++i) {
    pos[i] = pos[i - 1] + gap;
    gap *= ratio;
  }
  gap = 1.0;
  for (std::size_t back = center_index; back > 0; --back) {
    pos[back - 1] = pos[back] - gap;
    gap *= ratio;
  }
  const double lo = pos.front();
  const double span = pos.back() - pos.front();
  for (auto& p : pos) p = (p - lo) / span;
  pos.front() = 0.0;
  pos.back() = 1.0;
  return points_from_coords_1d(pos);
}

// ---------------------------------------------------------------------------
// Monotone tanh-warped axes: coordinates solve
//   g(p_i) = i / (N-1),   g(p) prop. to  p + (s/kappa) * tanh(kappa*(p-focus))
// (normalized to g(0)=0, g(1)=1, kappa fixed at 6).  g is steepest near the
// focus, so solving for equispaced g-values concentrates points there;
// sharpness s = 0 degenerates to the equispaced axis i/(N-1).
// ---------------------------------------------------------------------------

inline std::vector<double> gen_lattice_tanh_axis(std::size_t n, double focus,
                                                 double sharpness) {
  if (n < 2) throw ConfigError("lattice axis requires N >= 2");
  if (!(focus >= 0.0 && focus <= 1.0))
    throw ConfigError("focus must lie in [0,1]");
  if (!(sharpness >= 0.0)) throw ConfigError("sharpness must be >= 0");

  constexpr double kappa = 6.0;
  const auto g_raw = [&](double p) {
    return p + (sharpness / kappa) * std::tanh(kappa * (p - focus));
  };
  const double g0 = g_raw(0.0);
  const double g1 = g_raw(1.0);
  std::vector<double> axis(n);
  axis.front() = 0.0;
  axis.back() = 1.0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double target = static_cast<double>(i) / static_cast<double>(n - 1);
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 80; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double value = (g_raw(mid) - g0) / (g1 - g0);
      if (value < target)
        lo = mid;
      else
        hi = mid;
    }
    axis[i] = 0.5 * (lo + hi);
  }
  return axis;
}

struct LatticeAxes {
  std::vector<double> axis0;
  std::vector<double> axis1;
};

inline LatticeAxes gen_lattice_tanh_2d(std::size_t n0, std::size_t n1,
                                       double focus, double sharpness) {
  LatticeAxes axes;
  axes.axis0 = gen_lattice_tanh_axis(n0, focus, sharpness);
  axes.axis1 = gen_lattice_tanh_axis(n1, focus, sharpness);
  return axes;
}

// Full product cloud for a 2D lattice, rows ordered axis-1-fastest:
// point (axis0[n0], axis1[n1]) sits at row n0 * N1 + n1, matching the
// row-major layout of a lattice field matrix.
inline PointSet lattice_product_points(const std::vector<double>& axis0,
                                       const std::vector<double>& axis1) {
  PointSet ps;
  ps.coords = RMat(axis0.size() * axis1.size(), 2);
  for (std::size_t i0 = 0; i0 < axis0.size(); ++i0) {
    for (std::size_t i1 = 0; i1 < axis1.size(); ++i1) {
      const std::size_t row = i0 * axis1.size() + i1;
      ps.coords(row, 0) = axis0[i0];
      ps.coords(row, 1) = axis1[i1];
    }
  }
  return ps;
}

// I.i.d. uniform cloud in [0,1)^D.  Draw order: point by point, coordinate
// by coordinate, one next_double() each.
inline PointSet gen_random_cloud(std::size_t n, std::size_t dim,
                                 std::uint64_t seed) {
  if (n < 1 || dim < 1)
    throw ConfigError("gen_random_cloud requires N >= 1 and D >= 1");
  SplitMix64 rng(seed);
  PointSet ps;
  ps.coords = RMat(n, dim);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t d = 0; d < dim; ++d) ps.coords(i, d) = rng.next_double();
  return ps;
}

// Uniform distribution over the sphere surface.  Draw order per point:
// u_phi then u_cos; phi = 2*pi*u_phi, cos(theta) = 2*u_cos - 1.
inline PointSet gen_sphere_uniform(std::size_t n, std::uint64_t seed) {
  if (n < 1) throw ConfigError("gen_sphere_uniform requires N >= 1");
  SplitMix64 rng(seed);
  PointSet ps;
  ps.geometry = Geometry::spherical;
  ps.coords = RMat(n, 2);
  for (std::size_t i = 0; i < n; ++i) {
    const double phi = kTwoPi * rng.next_double();
    const double cos_theta = 2.0 * rng.next_double() - 1.0;
    ps.coords(i, 0) = std::acos(std::min(1.0, std::max(-1.0, cos_theta)));
    ps.coords(i, 1) = phi;
  }
  return ps;
}

// ---------------------------------------------------------------------------
// Band-limited random fields
//   x(p) = sum_{|q_d| <= K} a_q exp(+2*pi*i * q . p)
// with complex Gaussian coefficients symmetrized so a_{-q} = conj(a_q) and
// the field is real up to rounding.  The coefficient grid (2K+1)^D is kept so
// consumers know the exact spectral ground truth at any point set.
// ---------------------------------------------------------------------------

struct BandLimitedField {
  Field field;          // N x C samples at the generating point set
  CMat coeffs;          // (2K+1)^D x C, axis-0 digit varying fastest
  std::size_t max_freq = 0;
  std::size_t dim = 1;
};

namespace detail {
inline long long band_digit_to_freq(std::size_t digit, std::size_t max_freq) {
  return static_cast<long long>(digit) - static_cast<long long>(max_freq);
}
}  // namespace detail

// Synthesize sum_q coeffs_q exp(2*pi*i q.p) at arbitrary cartesian points.
inline Field eval_band_limited(const CMat& coeffs, std::size_t max_freq,
                               std::size_t dim, const PointSet& points) {
  points.require_unit_cube();
  if (points.dim() != dim)
    throw ShapeError("eval_band_limited: point dimension mismatch");
  const std::size_t side = 2 * max_freq + 1;
  std::size_t grid = 1;
  for (std::size_t d = 0; d < dim; ++d) grid *= side;
  if (coeffs.rows != grid)
    throw ShapeError("eval_band_limited: coefficient grid size mismatch");

  Field out;
  out.point_fingerprint = points.fingerprint();
  out.values = CMat(points.n_points(), coeffs.cols);
  std::vector<long long> freq(dim);
  for (std::size_t q = 0; q < grid; ++q) {
    std::size_t rem = q;
    for (std::size_t d = 0; d < dim; ++d) {
      freq[d] = detail::band_digit_to_freq(rem % side, max_freq);
      rem /= side;
    }
    for (std::size_t k = 0; k < points.n_points(); ++k) {
      double phase = 0.0;
      for (std::size_t d = 0; d < dim; ++d)
        phase += static_cast<double>(freq[d]) * points.coords(k, d);
      const Complex e(std::cos(kTwoPi * phase), std::sin(kTwoPi * phase));
      for (std::size_t ch = 0; ch < coeffs.cols; ++ch)
        out.values(k, ch) += coeffs(q, ch) * e;
    }
  }
  return out;
}

// d/dx of the synthesis above (1D): coefficient q maps to 2*pi*i*q * a_q.
inline Field eval_band_limited_derivative_1d(const CMat& coeffs,
                                             std::size_t max_freq,
                                             const PointSet& points) {
  const std::size_t side = 2 * max_freq + 1;
  if (coeffs.rows != side)
    throw ShapeError("eval_band_limited_derivative_1d: grid size mismatch");
  CMat scaled = coeffs;
  for (std::size_t q = 0; q < side; ++q) {
    const double f =
        static_cast<double>(detail::band_digit_to_freq(q, max_freq));
    const Complex factor(0.0, kTwoPi * f);
    for (std::size_t ch = 0; ch < coeffs.cols; ++ch)
      scaled(q, ch) = coeffs(q, ch) * factor;
  }
  return eval_band_limited(scaled, max_freq, 1, points);
}

// Draw order: channel by channel, flat grid index by flat grid index, one
// Gaussian pair (re, im) each; then the Hermitian part (b_q + conj(b_{-q}))/2
// replaces the raw draws.  Coefficient scale 1/sqrt(2*(2K+1)^D) keeps the
// field's variance near 1/2 regardless of the band limit.
inline BandLimitedField gen_random_band_limited_field(const PointSet& points,
                                                      std::size_t max_freq,
                                                      std::size_t channels,
                                                      std::uint64_t seed) {
  points.require_unit_cube();
  if (channels < 1) throw ConfigError("channels must be >= 1");
  const std::size_t dim = points.dim();
  const std::size_t side = 2 * max_freq + 1;
  std::size_t grid = 1;
  for (std::size_t d = 0; d < dim; ++d) grid *= side;

  SplitMix64 rng(seed);
  CMat raw(grid, channels);
  const double scale = 1.0 / std::sqrt(2.0 * static_cast<double>(grid));
  for (std::size_t ch = 0; ch < channels; ++ch) {
    for (std::size_t q = 0; q < grid; ++q) {
      double g0, g1;
      rng.next_gaussian_pair(g0, g1);
      raw(q, ch) = Complex(scale * g0, scale * g1);
    }
  }

  // Index of -q given the flat index of q.
  const auto negate_flat = [&](std::size_t q) {
    std::size_t out = 0, stride = 1, rem = q;
    for (std::size_t d = 0; d < dim; ++d) {
      const std::size_t digit = rem % side;
      rem /= side;
      out += (side - 1 - digit) * stride;
      stride *= side;
    }
    return out;
  };

  BandLimitedField blf;
  blf.max_freq = max_freq;
  blf.dim = dim;
  blf.coeffs = CMat(grid, channels);
  for (std::size_t q = 0; q < grid; ++q) {
    const std::size_t nq = negate_flat(q);
    for (std::size_t ch = 0; ch < channels; ++ch)
      blf.coeffs(q, ch) =
          0.5 * (raw(q, ch) + std::conj(raw(nq, ch)));
  }
  blf.field = eval_band_limited(blf.coeffs, max_freq, dim, points);
  return blf;
}

}  // namespace dse
