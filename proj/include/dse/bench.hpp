#pragma once

// Timing harness for the dense transform against the reference FFT and naive
// DFT baselines: per-method build/apply medians, mode sweeps written as CSV,
// and scaling-exponent fits.  Times are wall-clock medians over >= 5
// repetitions after fixed warm-ups; the timed kernels are the ordinary
// library calls, so timing can never perturb numerical results.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "dse/common.hpp"
#include "dse/core.hpp"
#include "dse/distributions.hpp"
#include "dse/fftref.hpp"
#include "dse/nudft.hpp"

namespace dse {

enum class BenchMethod { dse, fft_truncated, dft_naive, lattice_dse };

inline const char* bench_method_name(BenchMethod m) {
  switch (m) {
    case BenchMethod::dse: return "dse";
    case BenchMethod::fft_truncated: return "fft_truncated";
    case BenchMethod::dft_naive: return "dft_naive";
    case BenchMethod::lattice_dse: return "lattice_dse";
  }
  throw ConfigError("unknown bench method");
}

inline BenchMethod parse_bench_method(const std::string& s) {
  if (s == "dse") return BenchMethod::dse;
  if (s == "fft" || s == "fft_truncated") return BenchMethod::fft_truncated;
  if (s == "dft" || s == "dft_naive") return BenchMethod::dft_naive;
  if (s == "lattice" || s == "lattice_dse") return BenchMethod::lattice_dse;
  throw ConfigError("unknown bench method '" + s + "'");
}

struct BenchRecord {
  std::string method;
  std::size_t n_points = 0;
  std::size_t m_total = 0;
  std::size_t dim = 1;
  std::size_t reps = 0;
  double build_ns_median = 0.0;
  double apply_ns_median = 0.0;
  double flops_model = 0.0;
  std::string timestamp;
  std::string machine_tag;
};

struct BenchOptions {
  std::size_t reps = 9;
  unsigned threads = 1;   // >1 enables the row-partitioned matvec
  bool fp32 = false;      // time the 32-bit kernel instead (throughput only)
  std::uint64_t seed = 42;
};

namespace detail {
inline double median_ns(std::vector<double>& samples) {
  std::sort(samples.begin(), samples.end());
  return samples[samples.size() / 2];
}

template <class F>
double time_median_ns(F&& fn, std::size_t reps) {
  for (int i = 0; i < 3; ++i) fn();  // warm-up, excluded from the median
  std::vector<double> ns;
  ns.reserve(reps);
  for (std::size_t i = 0; i < reps; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const auto t1 = std::chrono::steady_clock::now();
    ns.push_back(static_cast<double>(
        std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0)
            .count()));
  }
  return median_ns(ns);
}

inline std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

inline bool is_equispaced_1d(const PointSet& points, double tol = 1e-12) {
  if (points.dim() != 1) return false;
  const std::size_t n = points.n_points();
  for (std::size_t i = 0; i < n; ++i) {
    const double expected =
        static_cast<double>(i) / static_cast<double>(n);
    if (std::abs(points.coords(i, 0) - expected) > tol) return false;
  }
  return true;
}

inline std::vector<Complex> random_complex_signal(std::size_t n,
                                                  std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<Complex> x(n);
  for (auto& v : x)
    v = Complex(2.0 * rng.next_double() - 1.0, 2.0 * rng.next_double() - 1.0);
  return x;
}
}  // namespace detail

// Times one (method, cloud, mode count) combination.  Matrix construction
// and application are timed separately.  If `result_out` is given it
// receives the apply output of the final repetition, so callers can verify
// that timed and untimed results are identical.
inline BenchRecord time_transform(BenchMethod method, const PointSet& points,
                                  const ModeSpec& modes,
                                  const BenchOptions& opts,
                                  std::vector<Complex>* result_out = nullptr) {
  if (opts.reps < 5) throw ConfigError("bench requires reps >= 5");
  const std::size_t n = points.n_points();
  const std::size_t m_total = modes.m_total();

  BenchRecord rec;
  rec.method = bench_method_name(method);
  rec.n_points = n;
  rec.m_total = m_total;
  rec.dim = modes.kind == BasisKind::fourier ? modes.dim : 2;
  rec.reps = opts.reps;
  rec.timestamp = detail::utc_timestamp();
  rec.machine_tag = opts.fp32 ? "fp32" : "fp64";
  if (opts.threads > 1)
    rec.machine_tag += "|threads=" + std::to_string(opts.threads);

  std::vector<Complex> x = detail::random_complex_signal(n, opts.seed);
  std::vector<Complex> result;

  switch (method) {
    case BenchMethod::dse: {
      rec.flops_model = estimate_flops(n, m_total, modes.dim);
      SpectralMatrix matrix;
      rec.build_ns_median = detail::time_median_ns(
          [&]() {
            matrix = build_fourier_matrix(points, modes, Normalization::none);
          },
          opts.reps);
      if (opts.fp32) {
        Mat<std::complex<float>> m32(matrix.entries.rows, matrix.entries.cols);
        for (std::size_t i = 0; i < m32.size(); ++i)
          m32.a[i] = std::complex<float>(
              static_cast<float>(matrix.entries.a[i].real()),
              static_cast<float>(matrix.entries.a[i].imag()));
        std::vector<std::complex<float>> x32(n), y32;
        for (std::size_t i = 0; i < n; ++i)
          x32[i] = std::complex<float>(static_cast<float>(x[i].real()),
                                       static_cast<float>(x[i].imag()));
        rec.apply_ns_median = detail::time_median_ns(
            [&]() { matvec_into(m32, x32, y32); }, opts.reps);
        result.assign(y32.begin(), y32.end());
      } else if (opts.threads > 1) {
        rec.apply_ns_median = detail::time_median_ns(
            [&]() { result = matvec_threaded(matrix.entries, x, opts.threads); },
            opts.reps);
      } else {
        rec.apply_ns_median = detail::time_median_ns(
            [&]() { result = matvec(matrix.entries, x); }, opts.reps);
      }
      break;
    }
    case BenchMethod::fft_truncated: {
      if (!detail::is_equispaced_1d(points))
        throw ConfigError(
            "fft_truncated benchmarks require 1D equispaced points");
      std::vector<Complex> padded = x;
      if (!is_power_of_two(n)) {
        std::size_t p = 1;
        while (p < n) p <<= 1;
        padded.resize(p, Complex{});
        rec.machine_tag += "|padded_fft_to_" + std::to_string(p);
      }
      if (m_total > padded.size())
        throw ConfigError("fft_truncated: m exceeds (padded) signal length");
      const double pn = static_cast<double>(padded.size());
      rec.flops_model = 5.0 * pn * std::log2(pn);  // standard FFT model
      rec.build_ns_median = 0.0;
      rec.apply_ns_median = detail::time_median_ns(
          [&]() { result = fft_truncated(padded, m_total); }, opts.reps);
      break;
    }
    case BenchMethod::dft_naive: {
      const double pn = static_cast<double>(n);
      rec.flops_model = 8.0 * pn * pn;
      rec.build_ns_median = 0.0;
      rec.apply_ns_median = detail::time_median_ns(
          [&]() {
            result = dft_naive(x);
            result.resize(std::min<std::size_t>(m_total, result.size()));
          },
          opts.reps);
      break;
    }
    case BenchMethod::lattice_dse:
      throw ConfigError(
          "lattice_dse timing takes per-axis inputs; use time_lattice");
  }

  if (result_out) *result_out = std::move(result);
  return rec;
}

// Separable-lattice timing: build both axis factors, apply V0 * F * V1^T.
inline BenchRecord time_lattice(const std::vector<double>& axis0,
                                const std::vector<double>& axis1,
                                std::size_t m, const BenchOptions& opts,
                                CMat* result_out = nullptr) {
  if (opts.reps < 5) throw ConfigError("bench requires reps >= 5");
  const std::size_t n0 = axis0.size();
  const std::size_t n1 = axis1.size();

  BenchRecord rec;
  rec.method = bench_method_name(BenchMethod::lattice_dse);
  rec.n_points = n0 * n1;
  rec.m_total = m * m;
  rec.dim = 2;
  rec.reps = opts.reps;
  rec.timestamp = detail::utc_timestamp();
  rec.machine_tag = "fp64";
  // Two chained dense stages: m*N0*N1 then m*m*N1 complex products.
  rec.flops_model = 8.0 * (static_cast<double>(m) * n0 * n1 +
                           static_cast<double>(m) * m * n1);

  SplitMix64 rng(opts.seed);
  CMat field(n0, n1);
  for (auto& v : field.a)
    v = Complex(2.0 * rng.next_double() - 1.0, 2.0 * rng.next_double() - 1.0);

  LatticeFactors factors;
  rec.build_ns_median = detail::time_median_ns(
      [&]() {
        factors =
            build_lattice_factors(axis0, axis1, m, Normalization::unitary);
      },
      opts.reps);
  CMat result;
  rec.apply_ns_median = detail::time_median_ns(
      [&]() { result = lattice_forward(factors, field); }, opts.reps);
  if (result_out) *result_out = std::move(result);
  return rec;
}

// ---------------------------------------------------------------------------
// CSV output.  Fixed columns; append-safe (the header is written only when
// the file is new or empty).
// ---------------------------------------------------------------------------

inline constexpr const char* kBenchCsvHeader =
    "method,N,m_total,D,apply_ns_median,build_ns_median,flops_model";

inline void append_bench_csv(const std::string& path,
                             const std::vector<BenchRecord>& records) {
  bool need_header = true;
  {
    std::ifstream probe(path, std::ios::binary);
    if (probe.good() && probe.peek() != std::ifstream::traits_type::eof())
      need_header = false;
  }
  std::ofstream out(path, std::ios::app | std::ios::binary);
  if (!out) throw IoError("cannot open bench CSV for append: " + path);
  if (need_header) out << kBenchCsvHeader << "\n";
  char buf[64];
  for (const auto& r : records) {
    out << r.method << ',' << r.n_points << ',' << r.m_total << ',' << r.dim
        << ',';
    std::snprintf(buf, sizeof(buf), "%.17g", r.apply_ns_median);
    out << buf << ',';
    std::snprintf(buf, sizeof(buf), "%.17g", r.build_ns_median);
    out << buf << ',';
    std::snprintf(buf, sizeof(buf), "%.17g", r.flops_model);
    out << buf << '\n';
  }
  if (!out) throw IoError("failed writing bench CSV: " + path);
}

// One record per (method, m) over a shared equispaced cloud of size N.
inline std::vector<BenchRecord> run_mode_sweep(
    std::size_t n, const std::vector<std::size_t>& m_list,
    const std::vector<BenchMethod>& methods, const std::string& out_path,
    const BenchOptions& opts) {
  if (m_list.empty()) throw ConfigError("run_mode_sweep: empty mode list");
  if (methods.empty()) throw ConfigError("run_mode_sweep: no methods");
  const PointSet points = gen_equispaced_1d(n);
  std::vector<BenchRecord> records;
  for (const auto method : methods) {
    for (const auto m : m_list) {
      const ModeSpec modes = ModeSpec::fourier(m, 1);
      records.push_back(time_transform(method, points, modes, opts));
    }
  }
  if (!out_path.empty()) append_bench_csv(out_path, records);
  return records;
}

// ---------------------------------------------------------------------------
// Fits.
// ---------------------------------------------------------------------------

struct PowerLawFit {
  double slope = 0.0;
  double stderr_slope = 0.0;
};

// Least-squares slope in log-log space over (axis value, time) pairs.
inline PowerLawFit fit_scaling_exponent(
    const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 4)
    throw ConfigError("scaling fit requires >= 4 points");
  double lo = points.front().first, hi = points.front().first;
  for (const auto& p : points) {
    lo = std::min(lo, p.first);
    hi = std::max(hi, p.first);
    if (!(p.first > 0.0) || !(p.second > 0.0))
      throw ConfigError("scaling fit requires positive values");
  }
  if (hi / lo < 8.0)
    throw ConfigError("scaling fit requires an axis span of at least 8x");

  const std::size_t n = points.size();
  double sx = 0.0, sy = 0.0;
  for (const auto& p : points) {
    sx += std::log(p.first);
    sy += std::log(p.second);
  }
  const double mx = sx / static_cast<double>(n);
  const double my = sy / static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (const auto& p : points) {
    const double dx = std::log(p.first) - mx;
    const double dy = std::log(p.second) - my;
    sxx += dx * dx;
    sxy += dx * dy;
  }
  PowerLawFit fit;
  fit.slope = sxy / sxx;
  double ss_res = 0.0;
  for (const auto& p : points) {
    const double dy = std::log(p.second) - my - fit.slope * (std::log(p.first) - mx);
    ss_res += dy * dy;
  }
  if (n > 2)
    fit.stderr_slope =
        std::sqrt(ss_res / (static_cast<double>(n) - 2.0) / sxx);
  return fit;
}

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 1.0;
};

// Plain least-squares line with its coefficient of determination.
inline LinearFit fit_linear(
    const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 2) throw ConfigError("linear fit requires >= 2 points");
  const std::size_t n = points.size();
  double sx = 0.0, sy = 0.0;
  for (const auto& p : points) {
    sx += p.first;
    sy += p.second;
  }
  const double mx = sx / static_cast<double>(n);
  const double my = sy / static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& p : points) {
    const double dx = p.first - mx;
    const double dy = p.second - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0.0) throw ConfigError("linear fit requires distinct x values");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (const auto& p : points) {
    const double r = p.second - (fit.intercept + fit.slope * p.first);
    ss_res += r * r;
  }
  fit.r2 = syy == 0.0 ? 1.0 : 1.0 - ss_res / syy;
  return fit;
}

}  // namespace dse
