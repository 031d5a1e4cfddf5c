#pragma once

// Spherical-harmonic analysis on arbitrary spherical point sets: flat index
// mapping, fully normalized associated Legendre recurrences, dense matrix
// construction, forward/adjoint application, and equiangular quadrature
// weights for validation workflows.

#include <optional>
#include <vector>

#include "dse/common.hpp"
#include "dse/core.hpp"
#include "dse/nudft.hpp"

namespace dse {

// ---------------------------------------------------------------------------
// Flat index <-> (degree l, order m).  Rows are ordered j = l^2 + l + m, so
// degree l occupies rows [l^2, (l+1)^2) with orders -l..l left to right, and
// l = floor(sqrt(j)), m = j - (l^2 + l).
// ---------------------------------------------------------------------------

struct ShIndex {
  std::size_t j = 0;
  std::size_t l = 0;
  long long m_order = 0;
};

inline ShIndex sh_index_from_flat(std::size_t j) {
  std::size_t l = static_cast<std::size_t>(
      std::sqrt(static_cast<double>(j)));
  while ((l + 1) * (l + 1) <= j) ++l;
  while (l * l > j) --l;
  ShIndex idx;
  idx.j = j;
  idx.l = l;
  idx.m_order = static_cast<long long>(j) -
                static_cast<long long>(l * l + l);
  return idx;
}

inline std::size_t sh_flat_from_lm(std::size_t l, long long m_order) {
  if (m_order < -static_cast<long long>(l) ||
      m_order > static_cast<long long>(l))
    throw IndexError("order |m| exceeds degree l");
  return static_cast<std::size_t>(static_cast<long long>(l * l + l) + m_order);
}

// ---------------------------------------------------------------------------
// Fully normalized associated Legendre function with the (-1)^m phase folded
// in, so that Y_l^m(theta, phi) = legendre(l, m, cos theta) * exp(i*m*phi)
// is orthonormal over the sphere.  Evaluated with the standard stable
// recurrences: diagonal lift, first off-diagonal, then upward in degree.
// ---------------------------------------------------------------------------

namespace detail {
// Fills table[l][m] for all 0 <= m <= l < l_count at argument x = cos(theta).
// Layout: table[l * l_count + m].
inline void normalized_legendre_table(std::size_t l_count, double x,
                                      std::vector<double>& table) {
  const double sin_theta = std::sqrt(std::max(0.0, 1.0 - x * x));
  table.assign(l_count * l_count, 0.0);
  table[0] = 1.0 / std::sqrt(4.0 * kPi);
  for (std::size_t m = 1; m < l_count; ++m) {
    const double dm = static_cast<double>(m);
    table[m * l_count + m] = -std::sqrt((2.0 * dm + 1.0) / (2.0 * dm)) *
                             sin_theta * table[(m - 1) * l_count + (m - 1)];
  }
  for (std::size_t m = 0; m < l_count; ++m) {
    if (m + 1 < l_count) {
      const double dm = static_cast<double>(m);
      table[(m + 1) * l_count + m] =
          std::sqrt(2.0 * dm + 3.0) * x * table[m * l_count + m];
    }
    for (std::size_t l = m + 2; l < l_count; ++l) {
      const double dl = static_cast<double>(l);
      const double dm = static_cast<double>(m);
      const double a =
          std::sqrt((4.0 * dl * dl - 1.0) / (dl * dl - dm * dm));
      const double b = std::sqrt(((dl - 1.0) * (dl - 1.0) - dm * dm) /
                                 (4.0 * (dl - 1.0) * (dl - 1.0) - 1.0));
      table[l * l_count + m] =
          a * (x * table[(l - 1) * l_count + m] -
               b * table[(l - 2) * l_count + m]);
    }
  }
}
}  // namespace detail

inline double associated_legendre(std::size_t l, std::size_t m_abs, double x) {
  if (m_abs > l) throw IndexError("associated_legendre requires m <= l");
  if (!(x >= -1.0 && x <= 1.0))
    throw DomainError("associated_legendre argument outside [-1, 1]");
  std::vector<double> table;
  detail::normalized_legendre_table(l + 1, x, table);
  return table[l * (l + 1) + m_abs];
}

// ---------------------------------------------------------------------------
// Dense spherical analysis matrix.  Row j holds conj(Y_l^m) sampled at each
// point, the analysis convention that makes weighted projection of sampled
// harmonics recover unit coefficients; the adjoint (conjugate transpose) is
// then plain harmonic synthesis sum_j X_j Y_j.  Negative orders come from
// Y_l^{-m} = (-1)^m conj(Y_l^m).
// ---------------------------------------------------------------------------

inline SpectralMatrix build_sh_matrix(const PointSet& points,
                                      std::size_t l_max) {
  if (l_max < 1) throw ConfigError("l_max must be >= 1");
  points.require_sphere();
  const std::size_t n = points.n_points();
  const std::size_t m_total = l_max * l_max;

  SpectralMatrix out;
  out.normalization = Normalization::none;
  out.mode_spec = ModeSpec::spherical(l_max);
  out.point_fingerprint = points.fingerprint();
  out.entries = CMat(m_total, n);

  std::vector<double> legendre;
  for (std::size_t k = 0; k < n; ++k) {
    const double theta = points.coords(k, 0);
    const double phi = points.coords(k, 1);
    detail::normalized_legendre_table(l_max, std::cos(theta), legendre);
    for (std::size_t j = 0; j < m_total; ++j) {
      const ShIndex idx = sh_index_from_flat(j);
      if (idx.m_order >= 0) {
        const auto mo = static_cast<std::size_t>(idx.m_order);
        const double p = legendre[idx.l * l_max + mo];
        const double ang = static_cast<double>(mo) * phi;
        // conj(Y_l^m) = legendre * exp(-i*m*phi)
        out.entries(j, k) =
            Complex(p * std::cos(ang), -p * std::sin(ang));
      } else {
        const auto a = static_cast<std::size_t>(-idx.m_order);
        const double sign = (a % 2 == 0) ? 1.0 : -1.0;
        const double p = sign * legendre[idx.l * l_max + a];
        const double ang = static_cast<double>(a) * phi;
        // conj(Y_l^{-a}) = (-1)^a * legendre * exp(+i*a*phi)
        out.entries(j, k) = Complex(p * std::cos(ang), p * std::sin(ang));
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Equiangular quadrature for validation: n_theta colatitude rings at
// theta_t = pi*(2t+1)/(2*n_theta) with 2*n_theta equally spaced longitudes
// each.  Points are ring-major: index = t * (2*n_theta) + u.
// ---------------------------------------------------------------------------

inline PointSet equiangular_sphere_grid(std::size_t n_theta) {
  if (n_theta < 2 || n_theta % 2 != 0)
    throw ConfigError("equiangular grid requires an even n_theta >= 2");
  const std::size_t n_phi = 2 * n_theta;
  PointSet ps;
  ps.geometry = Geometry::spherical;
  ps.coords = RMat(n_theta * n_phi, 2);
  for (std::size_t t = 0; t < n_theta; ++t) {
    const double theta = kPi * (2.0 * static_cast<double>(t) + 1.0) /
                         (2.0 * static_cast<double>(n_theta));
    for (std::size_t u = 0; u < n_phi; ++u) {
      const double phi = kPi * static_cast<double>(u) /
                         static_cast<double>(n_theta);
      ps.coords(t * n_phi + u, 0) = theta;
      ps.coords(t * n_phi + u, 1) = phi;
    }
  }
  return ps;
}

struct QuadratureWeights {
  std::vector<double> w;  // one positive weight per grid point; sum = 4*pi
};

// Weights for the grid above, exact for band-limited integrands up to the
// grid bandwidth n_theta/2.  Ring weight:
//   w_t = (4/n_theta) * sin(theta_t) * sum_{k<n_theta/2} sin((2k+1)theta_t)/(2k+1)
// and each of the 2*n_theta points on ring t carries (pi/n_theta) * w_t.
inline QuadratureWeights dh_quadrature_weights(std::size_t n_theta) {
  if (n_theta < 2 || n_theta % 2 != 0)
    throw ConfigError("quadrature weights require an even n_theta >= 2");
  const std::size_t n_phi = 2 * n_theta;
  QuadratureWeights out;
  out.w.assign(n_theta * n_phi, 0.0);
  for (std::size_t t = 0; t < n_theta; ++t) {
    const double theta = kPi * (2.0 * static_cast<double>(t) + 1.0) /
                         (2.0 * static_cast<double>(n_theta));
    double s = 0.0;
    for (std::size_t k = 0; k < n_theta / 2; ++k) {
      const double odd = 2.0 * static_cast<double>(k) + 1.0;
      s += std::sin(odd * theta) / odd;
    }
    const double ring_weight =
        (4.0 / static_cast<double>(n_theta)) * std::sin(theta) * s;
    const double point_weight =
        (kPi / static_cast<double>(n_theta)) * ring_weight;
    for (std::size_t u = 0; u < n_phi; ++u) out.w[t * n_phi + u] = point_weight;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Forward / adjoint application.
// ---------------------------------------------------------------------------

// Unweighted: V * x (the plain dense analysis product on any cloud).
// Weighted:  V * (w .* x), the quadrature projection used on equiangular
// grids where it recovers exact coefficients of band-limited fields.
inline CoeffVector sh_forward(
    const PointSet& points, std::size_t l_max, const Field& field,
    const std::optional<QuadratureWeights>& weights = std::nullopt) {
  if (field.point_fingerprint != points.fingerprint())
    throw BindingError(
        "field is not bound to this point set (fingerprint mismatch)");
  const SpectralMatrix matrix = build_sh_matrix(points, l_max);
  if (!weights.has_value()) return complex_matvec(matrix, field);
  if (weights->w.size() != points.n_points())
    throw ShapeError("quadrature weight count " +
                     std::to_string(weights->w.size()) +
                     " != point count " + std::to_string(points.n_points()));
  Field weighted = field;
  for (std::size_t k = 0; k < weighted.values.rows; ++k)
    for (std::size_t ch = 0; ch < weighted.values.cols; ++ch)
      weighted.values(k, ch) *= weights->w[k];
  return complex_matvec(matrix, weighted);
}

// conj(V)^T X: synthesis of the band-limited function at the sample points.
inline Field sh_adjoint(const SpectralMatrix& matrix,
                        const CoeffVector& coeffs) {
  return nudft_adjoint(matrix, coeffs);
}

}  // namespace dse
