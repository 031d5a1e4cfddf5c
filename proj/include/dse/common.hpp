#pragma once

// Shared infrastructure: error hierarchy, diagnostics channel, byte hashing,
// and the deterministic pseudo-random generator used by every generator in
// this library.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <mutex>
#include <stdexcept>
#include <string>
#include <string_view>

namespace dse {

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr double kTwoPi = 2.0 * kPi;

// ---------------------------------------------------------------------------
// Errors.  Each class corresponds to one failure family; the CLI maps them to
// stable process exit codes (see tools/).
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Invalid configuration or argument values (bad mode counts, bad ratios, ...).
class ConfigError : public Error {
public:
  using Error::Error;
};

// Dimension/shape mismatches between operands.
class ShapeError : public Error {
public:
  using Error::Error;
};

// Size preconditions on a single operand (power-of-two length, m <= N, ...).
class SizeError : public ShapeError {
public:
  using ShapeError::ShapeError;
};

// Coordinates or values outside their mathematical domain.
class DomainError : public Error {
public:
  using Error::Error;
};

// Out-of-range index arithmetic.
class IndexError : public Error {
public:
  using Error::Error;
};

// A field/coefficient object used with a point set it was not built from.
class BindingError : public Error {
public:
  using Error::Error;
};

// File-system and serialization failures.
class IoError : public Error {
public:
  using Error::Error;
};

// Numerical breakdown at run time (NaN loss, degenerate norms, ...).
class NumericError : public Error {
public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Diagnostics channel: non-fatal warnings go here instead of stderr directly
// so embedders and tests can capture them.
// ---------------------------------------------------------------------------

using DiagnosticHandler = void (*)(std::string_view message);

namespace detail {
inline void default_diagnostic_handler(std::string_view message) {
  std::fwrite(message.data(), 1, message.size(), stderr);
  std::fputc('\n', stderr);
}

inline std::mutex& diagnostic_mutex() {
  static std::mutex m;
  return m;
}

inline DiagnosticHandler& diagnostic_slot() {
  static DiagnosticHandler h = &default_diagnostic_handler;
  return h;
}
}  // namespace detail

inline void set_diagnostic_handler(DiagnosticHandler h) {
  std::lock_guard<std::mutex> lock(detail::diagnostic_mutex());
  detail::diagnostic_slot() = h ? h : &detail::default_diagnostic_handler;
}

inline void emit_diagnostic(std::string_view message) {
  DiagnosticHandler h;
  {
    std::lock_guard<std::mutex> lock(detail::diagnostic_mutex());
    h = detail::diagnostic_slot();
  }
  h(message);
}

// ---------------------------------------------------------------------------
// FNV-1a 64-bit hash over raw bytes.  Used to fingerprint point sets so that
// fields and transforms can detect mismatched bindings.  Not cryptographic.
// ---------------------------------------------------------------------------

inline std::uint64_t fnv1a64(const void* data, std::size_t size) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (std::size_t i = 0; i < size; ++i) {
    hash ^= static_cast<std::uint64_t>(bytes[i]);
    hash *= 0x100000001b3ull;
  }
  return hash;
}

// ---------------------------------------------------------------------------
// SplitMix64: a tiny counter-based generator with a documented update rule so
// that identical seeds reproduce identical streams in any implementation of
// this library, in any language.
//
//   state += 0x9E3779B97F4A7C15
//   z = state
//   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//   output = z ^ (z >> 31)
//
// next_double() maps the top 53 bits into [0, 1):  (output >> 11) * 2^-53.
// next_gaussian_pair() applies the Box-Muller transform to two consecutive
// uniform draws (the first clamped away from zero before the logarithm).
// ---------------------------------------------------------------------------

class SplitMix64 {
public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform on [0, 1).
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Two independent standard normal deviates from two uniform draws.
  void next_gaussian_pair(double& g0, double& g1) {
    double u1 = next_double();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    const double u2 = next_double();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    g0 = radius * std::cos(kTwoPi * u2);
    g1 = radius * std::sin(kTwoPi * u2);
  }

private:
  std::uint64_t state_;
};

}  // namespace dse
