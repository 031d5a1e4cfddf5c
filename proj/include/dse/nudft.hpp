#pragma once

// Truncated nonuniform Fourier transforms evaluated as explicit dense
// matrix-vector products: 1D and N-D matrix builders, forward and adjoint
// application, the separable lattice variant, the literal-summation oracle,
// and the flop model for the dense path.

#include <list>
#include <memory>
#include <mutex>
#include <utility>
#include <vector>

#include "dse/common.hpp"
#include "dse/core.hpp"

namespace dse {

// Scaling conventions for the forward matrix:
//   paper   - sqrt(D/N) in D >= 2 dimensions, 1/sqrt(N) in 1D
//   unitary - 1/sqrt(N) in every dimension (equispaced full transforms become
//             unitary, enabling exact round trips)
//   none    - raw exponential sums
inline double normalization_constant(Normalization norm, std::size_t n_points,
                                     std::size_t dim) {
  switch (norm) {
    case Normalization::none:
      return 1.0;
    case Normalization::unitary:
      return 1.0 / std::sqrt(static_cast<double>(n_points));
    case Normalization::paper:
      if (dim <= 1) return 1.0 / std::sqrt(static_cast<double>(n_points));
      return std::sqrt(static_cast<double>(dim) /
                       static_cast<double>(n_points));
  }
  throw ConfigError("unknown normalization");
}

namespace detail {
inline void warn_if_overcomplete(std::size_t n_points, std::size_t m_total) {
  if (n_points < m_total)
    emit_diagnostic("note: N=" + std::to_string(n_points) +
                    " points with m_total=" + std::to_string(m_total) +
                    " modes: the transform is over-complete and the adjoint "
                    "is not a left inverse");
}
}  // namespace detail

// Entry (j, k) = c * exp(-2*pi*i * f_j * p_k) with f_j the (possibly
// symmetric-range) frequency for row j.
inline SpectralMatrix build_fourier_matrix_1d(const PointSet& points,
                                              const ModeSpec& modes,
                                              Normalization norm) {
  if (modes.kind != BasisKind::fourier)
    throw ConfigError("build_fourier_matrix_1d requires a fourier mode spec");
  if (points.dim() != 1)
    throw ShapeError("build_fourier_matrix_1d requires 1D points");
  points.require_unit_cube();
  const std::size_t n = points.n_points();
  const std::size_t m = modes.modes_per_dim;
  detail::warn_if_overcomplete(n, m);

  const double c = normalization_constant(norm, n, 1);
  SpectralMatrix out;
  out.normalization = norm;
  out.mode_spec = modes;
  out.point_fingerprint = points.fingerprint();
  out.entries = CMat(m, n);
  for (std::size_t j = 0; j < m; ++j) {
    const double f =
        static_cast<double>(frequency_for_index(j, m, modes.freq_range));
    for (std::size_t k = 0; k < n; ++k) {
      const double ang = -kTwoPi * f * points.coords(k, 0);
      out.entries(j, k) = Complex(c * std::cos(ang), c * std::sin(ang));
    }
  }
  return out;
}

// Row j, column k = c * exp(-2*pi*i * sum_d f(digit_d(j)) * P[k][d]), where
// digit_d(j) = floor(j / m^d) mod m: the flattened tensor-product layout with
// axis 0 varying fastest along rows.
inline SpectralMatrix build_fourier_matrix_nd(const PointSet& points,
                                              const ModeSpec& modes,
                                              Normalization norm) {
  if (modes.kind != BasisKind::fourier)
    throw ConfigError("build_fourier_matrix_nd requires a fourier mode spec");
  if (points.dim() != modes.dim)
    throw ShapeError("point dimension " + std::to_string(points.dim()) +
                     " != mode spec dimension " + std::to_string(modes.dim));
  if (modes.dim == 1) return build_fourier_matrix_1d(points, modes, norm);
  points.require_unit_cube();

  const std::size_t n = points.n_points();
  const std::size_t d = modes.dim;
  const std::size_t m = modes.modes_per_dim;
  const std::size_t m_total = modes.m_total();  // throws on index overflow
  detail::warn_if_overcomplete(n, m_total);

  const double c = normalization_constant(norm, n, d);
  SpectralMatrix out;
  out.normalization = norm;
  out.mode_spec = modes;
  out.point_fingerprint = points.fingerprint();
  out.entries = CMat(m_total, n);

  std::vector<double> freq(d);
  for (std::size_t j = 0; j < m_total; ++j) {
    std::size_t rem = j;
    for (std::size_t l = 0; l < d; ++l) {
      freq[l] =
          static_cast<double>(frequency_for_index(rem % m, m, modes.freq_range));
      rem /= m;
    }
    for (std::size_t k = 0; k < n; ++k) {
      double phase = 0.0;
      for (std::size_t l = 0; l < d; ++l) phase += freq[l] * points.coords(k, l);
      const double ang = -kTwoPi * phase;
      out.entries(j, k) = Complex(c * std::cos(ang), c * std::sin(ang));
    }
  }
  return out;
}

inline SpectralMatrix build_fourier_matrix(const PointSet& points,
                                           const ModeSpec& modes,
                                           Normalization norm) {
  return modes.dim == 1 ? build_fourier_matrix_1d(points, modes, norm)
                        : build_fourier_matrix_nd(points, modes, norm);
}

// ---------------------------------------------------------------------------
// Bounded cache of forward matrices keyed on (point fingerprint, mode spec,
// normalization).  Re-using a fixed cloud across many transforms then costs
// one construction.  The cache is internally synchronized and never changes
// numerical results (construction is deterministic).
// ---------------------------------------------------------------------------

namespace detail {
struct MatrixCacheKey {
  std::uint64_t fingerprint;
  ModeSpec spec;
  Normalization norm;

  bool operator==(const MatrixCacheKey& o) const {
    return fingerprint == o.fingerprint && spec == o.spec && norm == o.norm;
  }
};

class MatrixCache {
public:
  static constexpr std::size_t kCapacity = 16;

  std::shared_ptr<const SpectralMatrix> get_or_build(
      const MatrixCacheKey& key, const PointSet& points,
      const ModeSpec& modes, Normalization norm) {
    std::lock_guard<std::mutex> lock(mutex_);
    for (auto it = entries_.begin(); it != entries_.end(); ++it) {
      if (it->first == key) {
        entries_.splice(entries_.begin(), entries_, it);  // mark recent
        return entries_.front().second;
      }
    }
    auto built = std::make_shared<const SpectralMatrix>(
        build_fourier_matrix(points, modes, norm));
    entries_.emplace_front(key, built);
    if (entries_.size() > kCapacity) entries_.pop_back();
    return built;
  }

private:
  std::mutex mutex_;
  std::list<std::pair<MatrixCacheKey, std::shared_ptr<const SpectralMatrix>>>
      entries_;
};

inline MatrixCache& matrix_cache() {
  static MatrixCache cache;
  return cache;
}
}  // namespace detail

// Forward transform as a matrix-vector product.  The field must be bound to
// the given points (matching fingerprint).  With use_cache the matrix is
// reused across calls on the same cloud.
inline CoeffVector nudft_forward(const PointSet& points, const ModeSpec& modes,
                                 const Field& field, Normalization norm,
                                 bool use_cache = true) {
  if (field.point_fingerprint != points.fingerprint())
    throw BindingError(
        "field is not bound to this point set (fingerprint mismatch)");
  if (use_cache) {
    detail::MatrixCacheKey key{points.fingerprint(), modes, norm};
    auto matrix = detail::matrix_cache().get_or_build(key, points, modes, norm);
    return complex_matvec(*matrix, field);
  }
  return complex_matvec(build_fourier_matrix(points, modes, norm), field);
}

// Adjoint application: conj(V)^T X.  For m_total = N equispaced points under
// unitary normalization this inverts the forward transform exactly; for
// m_total < N it is the orthogonal projection onto the kept exponentials.
inline Field nudft_adjoint(const SpectralMatrix& matrix,
                           const CoeffVector& coeffs) {
  if (matrix.entries.rows != coeffs.values.rows)
    throw ShapeError("nudft_adjoint: matrix has " +
                     std::to_string(matrix.entries.rows) +
                     " rows but coefficients have " +
                     std::to_string(coeffs.values.rows));
  Field out;
  out.point_fingerprint = matrix.point_fingerprint;
  out.values = adjoint_matmul(matrix.entries, coeffs.values);
  return out;
}

// ---------------------------------------------------------------------------
// Separable lattice variant: for point sets that are tensor products of
// per-axis 1D distributions, store one m x N_axis matrix per axis
// (m * (N0 + N1) entries instead of m^2 * N0 * N1) and apply
// X = V0 * F * V1^T.
// ---------------------------------------------------------------------------

struct LatticeFactors {
  std::vector<CMat> axis_matrices;  // one m x N_axis matrix per axis
  std::size_t modes_per_dim = 0;
  FrequencyRange freq_range = FrequencyRange::nonnegative;

  std::size_t stored_entry_count() const {
    std::size_t total = 0;
    for (const auto& v : axis_matrices) total += v.size();
    return total;
  }
};

namespace detail {
inline CMat lattice_axis_matrix(const std::vector<double>& axis_points,
                                std::size_t m, FrequencyRange range,
                                Normalization norm) {
  if (m < 1) throw ConfigError("modes_per_dim must be >= 1");
  if (axis_points.empty()) throw ShapeError("empty lattice axis");
  for (std::size_t i = 0; i < axis_points.size(); ++i) {
    const double p = axis_points[i];
    if (!(p >= 0.0 && p <= 1.0))
      throw DomainError("lattice axis coordinate " + std::to_string(p) +
                        " outside [0,1]");
    if (i > 0 && axis_points[i] < axis_points[i - 1])
      throw DomainError("lattice axis coordinates must be sorted ascending");
  }
  // Per-axis scaling 1/sqrt(N_axis) so the separable product reproduces the
  // unitary general transform; `none` keeps raw sums.
  const double c = norm == Normalization::none
                       ? 1.0
                       : 1.0 / std::sqrt(static_cast<double>(axis_points.size()));
  CMat v(m, axis_points.size());
  for (std::size_t j = 0; j < m; ++j) {
    const double f = static_cast<double>(frequency_for_index(j, m, range));
    for (std::size_t k = 0; k < axis_points.size(); ++k) {
      const double ang = -kTwoPi * f * axis_points[k];
      v(j, k) = Complex(c * std::cos(ang), c * std::sin(ang));
    }
  }
  return v;
}
}  // namespace detail

inline LatticeFactors build_lattice_factors(
    const std::vector<double>& axis_points_0,
    const std::vector<double>& axis_points_1, std::size_t m,
    Normalization norm,
    FrequencyRange range = FrequencyRange::nonnegative) {
  LatticeFactors f;
  f.modes_per_dim = m;
  f.freq_range = range;
  f.axis_matrices.push_back(
      detail::lattice_axis_matrix(axis_points_0, m, range, norm));
  f.axis_matrices.push_back(
      detail::lattice_axis_matrix(axis_points_1, m, range, norm));
  return f;
}

// X = V0 * F * V1^T for a field F on the N0 x N1 lattice (row n0, column n1).
// X[a][b] is the coefficient of frequency pair (f_a along axis 0, f_b along
// axis 1); flattening X column-index-major (j = a + m*b) matches the general
// N-D transform's row order.
inline CMat lattice_forward(const LatticeFactors& factors, const CMat& field2d) {
  if (factors.axis_matrices.size() != 2)
    throw ShapeError("lattice_forward expects two axis factors");
  const CMat& v0 = factors.axis_matrices[0];
  const CMat& v1 = factors.axis_matrices[1];
  if (v0.cols != field2d.rows || v1.cols != field2d.cols)
    throw ShapeError("lattice_forward: field is " +
                     std::to_string(field2d.rows) + "x" +
                     std::to_string(field2d.cols) + " but factors expect " +
                     std::to_string(v0.cols) + "x" + std::to_string(v1.cols));
  const CMat t = matmul(v0, field2d);  // m x N1
  CMat x(v0.rows, v1.rows);
  for (std::size_t a = 0; a < t.rows; ++a) {
    for (std::size_t b = 0; b < v1.rows; ++b) {
      Complex acc{};
      for (std::size_t n1 = 0; n1 < t.cols; ++n1) acc += t(a, n1) * v1(b, n1);
      x(a, b) = acc;
    }
  }
  return x;
}

// ---------------------------------------------------------------------------
// Literal-summation oracle.  Shares no arithmetic with the matrix path: the
// phase per (mode, point) pair is re-derived digit by digit and accumulated
// through separate cos/sin sums.  Intended for small N and m only.
// ---------------------------------------------------------------------------

inline CoeffVector brute_force_nudft(const PointSet& points,
                                     const ModeSpec& modes,
                                     const Field& field) {
  if (modes.kind != BasisKind::fourier)
    throw ConfigError("brute_force_nudft handles fourier mode specs only");
  if (field.values.rows != points.n_points())
    throw ShapeError("brute_force_nudft: field rows != point count");
  const std::size_t n = points.n_points();
  const std::size_t d = points.dim();
  if (d != modes.dim) throw ShapeError("brute_force_nudft: dimension mismatch");
  const std::size_t m = modes.modes_per_dim;
  const std::size_t m_total = modes.m_total();
  const std::size_t channels = field.values.cols;

  // Raw exponential sums; the normalized overload below applies a scaling.
  CoeffVector out;
  out.mode_spec = modes;
  out.values = CMat(m_total, channels);
  for (std::size_t j = 0; j < m_total; ++j) {
    for (std::size_t ch = 0; ch < channels; ++ch) {
      double re = 0.0, im = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        double phase = 0.0;
        std::size_t rem = j;
        for (std::size_t l = 0; l < d; ++l) {
          const std::size_t digit = rem % m;
          rem /= m;
          double f = static_cast<double>(digit);
          if (modes.freq_range == FrequencyRange::symmetric &&
              digit >= (m + 1) / 2)
            f = static_cast<double>(digit) - static_cast<double>(m);
          phase += f * points.coords(k, l);
        }
        const double ang = -kTwoPi * phase;
        const double cs = std::cos(ang);
        const double sn = std::sin(ang);
        const Complex xv = field.values(k, ch);
        re += xv.real() * cs - xv.imag() * sn;
        im += xv.real() * sn + xv.imag() * cs;
      }
      out.values(j, ch) = Complex(re, im);
    }
  }
  return out;
}

// Oracle with a chosen scaling applied, for direct comparison against the
// matrix path.
inline CoeffVector brute_force_nudft(const PointSet& points,
                                     const ModeSpec& modes, const Field& field,
                                     Normalization norm) {
  CoeffVector raw = brute_force_nudft(points, modes, field);
  const double c = normalization_constant(norm, points.n_points(), modes.dim);
  for (auto& v : raw.values.a) v *= c;
  return raw;
}

// Documented cost model for the dense path: a real-input 1D transform costs
// 4*N*m - 4*N flops; the complex N-D transform costs 8*N*m_total.  Used by
// the benchmark for scaling fits, never asserted against hardware counters.
inline double estimate_flops(std::size_t n_points, std::size_t m_total,
                             std::size_t dim) {
  if (n_points == 0 || m_total == 0 || dim == 0)
    throw ConfigError("estimate_flops requires positive arguments");
  const double n = static_cast<double>(n_points);
  const double m = static_cast<double>(m_total);
  if (dim == 1) return 4.0 * n * m - 4.0 * n;
  return 8.0 * n * m;
}

}  // namespace dse
