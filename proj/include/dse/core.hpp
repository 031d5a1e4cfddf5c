#pragma once

// Domain types shared by every transform: point sets, mode specifications,
// spectral matrices, fields, and coefficient vectors, plus the flat-index
// arithmetic that fixes how multidimensional modes are laid out.

#include <cstdint>
#include <string>
#include <vector>

#include "dse/common.hpp"
#include "dse/matrix.hpp"

namespace dse {

enum class Geometry { cartesian, spherical };
enum class BasisKind { fourier, spherical };
enum class Normalization { paper, unitary, none };
enum class FrequencyRange { nonnegative, symmetric };

// ---------------------------------------------------------------------------
// PointSet: N points in the unit cube [0,1]^D (cartesian) or N (theta, phi)
// pairs on the sphere (spherical; theta in [0, pi], phi in [0, 2*pi)).
// Coordinates are stored row-major, one point per row.  Range checking is
// done by the consuming transform builders so that file loaders can round
// trip raw data unchanged.
// ---------------------------------------------------------------------------

struct PointSet {
  Geometry geometry = Geometry::cartesian;
  RMat coords;  // N x D (cartesian) or N x 2 as (theta, phi) (spherical)

  std::size_t n_points() const { return coords.rows; }
  std::size_t dim() const { return coords.cols; }

  // FNV-1a over the raw coordinate bytes; equality of fingerprints is
  // equality of coordinate bit patterns.
  std::uint64_t fingerprint() const {
    return fnv1a64(coords.data(), coords.size() * sizeof(double));
  }

  void require_unit_cube() const {
    if (geometry != Geometry::cartesian)
      throw DomainError("point set is not cartesian");
    for (std::size_t i = 0; i < coords.size(); ++i) {
      const double v = coords.a[i];
      if (!(v >= 0.0 && v <= 1.0))
        throw DomainError("coordinate " + std::to_string(v) +
                          " outside the unit interval [0,1]");
    }
  }

  void require_sphere() const {
    if (geometry != Geometry::spherical)
      throw DomainError("point set is not spherical");
    if (coords.cols != 2)
      throw ShapeError("spherical point set must have (theta, phi) columns");
    for (std::size_t k = 0; k < coords.rows; ++k) {
      const double theta = coords(k, 0);
      const double phi = coords(k, 1);
      if (!(theta >= 0.0 && theta <= kPi))
        throw DomainError("theta " + std::to_string(theta) +
                          " outside [0, pi]");
      if (!(phi >= 0.0 && phi < kTwoPi))
        throw DomainError("phi " + std::to_string(phi) +
                          " outside [0, 2*pi)");
    }
  }
};

// ---------------------------------------------------------------------------
// ModeSpec: which spectral basis and how many modes.
//   fourier:   m modes per dimension, m_total = m^D, with either nonnegative
//              frequencies f_j = j or the symmetric range
//              f_j in {0, 1, ..., ceil(m/2)-1, -floor(m/2), ..., -1}
//              (in that row order).
//   spherical: all degrees l < l_max, m_total = l_max^2.
// ---------------------------------------------------------------------------

struct ModeSpec {
  BasisKind kind = BasisKind::fourier;
  std::size_t dim = 1;           // fourier only
  std::size_t modes_per_dim = 1; // fourier only
  std::size_t l_max = 1;         // spherical only
  FrequencyRange freq_range = FrequencyRange::nonnegative;

  static ModeSpec fourier(std::size_t modes, std::size_t dim = 1,
                          FrequencyRange range = FrequencyRange::nonnegative) {
    if (modes < 1) throw ConfigError("modes_per_dim must be >= 1");
    if (dim < 1) throw ConfigError("dim must be >= 1");
    ModeSpec s;
    s.kind = BasisKind::fourier;
    s.dim = dim;
    s.modes_per_dim = modes;
    s.freq_range = range;
    return s;
  }

  static ModeSpec spherical(std::size_t l_max) {
    if (l_max < 1) throw ConfigError("l_max must be >= 1");
    ModeSpec s;
    s.kind = BasisKind::spherical;
    s.l_max = l_max;
    return s;
  }

  std::size_t m_total() const {
    if (kind == BasisKind::spherical) return l_max * l_max;
    std::size_t total = 1;
    for (std::size_t d = 0; d < dim; ++d) {
      if (modes_per_dim != 0 &&
          total > static_cast<std::size_t>(-1) / modes_per_dim)
        throw ConfigError("mode count m^D overflows the index type");
      total *= modes_per_dim;
    }
    return total;
  }

  bool operator==(const ModeSpec& o) const {
    if (kind != o.kind) return false;
    if (kind == BasisKind::spherical) return l_max == o.l_max;
    return dim == o.dim && modes_per_dim == o.modes_per_dim &&
           freq_range == o.freq_range;
  }
};

// Signed frequency for position `index` along one axis of m modes.
inline long long frequency_for_index(std::size_t index, std::size_t m,
                                     FrequencyRange range) {
  if (index >= m) throw IndexError("mode index out of range");
  if (range == FrequencyRange::nonnegative)
    return static_cast<long long>(index);
  const std::size_t half = (m + 1) / 2;  // ceil(m/2)
  return index < half ? static_cast<long long>(index)
                      : static_cast<long long>(index) -
                            static_cast<long long>(m);
}

// Flat row index for a multi-index, axis 0 varying fastest:
//   j = sum_d multi[d] * m^d.
inline std::size_t flatten_mode_index(const std::vector<std::size_t>& multi,
                                      std::size_t m) {
  std::size_t j = 0;
  std::size_t stride = 1;
  for (std::size_t d = 0; d < multi.size(); ++d) {
    if (multi[d] >= m)
      throw IndexError("mode multi-index component " + std::to_string(multi[d]) +
                       " out of range for m=" + std::to_string(m));
    j += multi[d] * stride;
    stride *= m;
  }
  return j;
}

// Inverse of flatten_mode_index: component d equals floor(j / m^d) mod m.
inline std::vector<std::size_t> unflatten_mode_index(std::size_t j,
                                                     std::size_t m,
                                                     std::size_t dim) {
  std::size_t total = 1;
  for (std::size_t d = 0; d < dim; ++d) total *= m;
  if (j >= total)
    throw IndexError("flat mode index " + std::to_string(j) +
                     " out of range for m^D=" + std::to_string(total));
  std::vector<std::size_t> multi(dim);
  for (std::size_t d = 0; d < dim; ++d) {
    multi[d] = j % m;
    j /= m;
  }
  return multi;
}

// ---------------------------------------------------------------------------
// SpectralMatrix / Field / CoeffVector.
// ---------------------------------------------------------------------------

struct SpectralMatrix {
  CMat entries;  // m_total x N
  Normalization normalization = Normalization::unitary;
  ModeSpec mode_spec;
  std::uint64_t point_fingerprint = 0;
};

struct Field {
  CMat values;  // N x C
  std::uint64_t point_fingerprint = 0;

  std::size_t n_points() const { return values.rows; }
  std::size_t channels() const { return values.cols; }
};

struct CoeffVector {
  CMat values;  // m_total x C
  ModeSpec mode_spec;

  std::size_t channels() const { return values.cols; }
};

// Dense complex product applied independently per channel: the transform
// itself.
inline CoeffVector complex_matvec(const SpectralMatrix& M, const Field& f) {
  if (M.entries.cols != f.values.rows)
    throw ShapeError("complex_matvec: matrix has " +
                     std::to_string(M.entries.cols) + " columns but field has " +
                     std::to_string(f.values.rows) + " rows");
  CoeffVector out;
  out.mode_spec = M.mode_spec;
  out.values = matmul(M.entries, f.values);
  return out;
}

}  // namespace dse
