#pragma once

// End-to-end self-checks exposed through the CLI `validate` command.  Each
// check exercises one structural property through the public API and reports
// its measured error against a pinned tolerance.  `inject_error` deliberately
// corrupts the unitarity check's normalization so callers can confirm the
// suite actually detects failures.

#include <string>
#include <vector>

#include "dse/bench.hpp"
#include "dse/common.hpp"
#include "dse/core.hpp"
#include "dse/distributions.hpp"
#include "dse/fftref.hpp"
#include "dse/nudft.hpp"
#include "dse/operator.hpp"
#include "dse/spherical.hpp"

namespace dse {

struct CheckResult {
  std::string name;
  bool pass = false;
  double max_err = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

namespace detail {
inline Field random_complex_field(const PointSet& points, std::size_t channels,
                                  std::uint64_t seed) {
  SplitMix64 rng(seed);
  Field f;
  f.point_fingerprint = points.fingerprint();
  f.values = CMat(points.n_points(), channels);
  for (auto& v : f.values.a)
    v = Complex(2.0 * rng.next_double() - 1.0, 2.0 * rng.next_double() - 1.0);
  return f;
}

inline CMat random_cmat(std::size_t rows, std::size_t cols,
                        std::uint64_t seed) {
  SplitMix64 rng(seed);
  CMat m(rows, cols);
  for (auto& v : m.a)
    v = Complex(2.0 * rng.next_double() - 1.0, 2.0 * rng.next_double() - 1.0);
  return m;
}

inline double inf_norm(const CMat& m) {
  double worst = 0.0;
  for (const auto& v : m.a) worst = std::max(worst, std::abs(v));
  return worst;
}

// max |a_i - b_i| / max_i |b_i|
inline double normalized_max_diff(const CMat& a, const CMat& b) {
  const double scale = std::max(inf_norm(b), 1e-300);
  return max_abs_diff(a, b) / scale;
}
}  // namespace detail

inline CheckResult check_fft_equivalence() {
  CheckResult r{"fft_equivalence", false, 0.0, 1e-10,
                "dense path vs radix-2 reference on equispaced grids"};
  for (const std::size_t n : {8, 64, 256}) {
    const PointSet points = gen_equispaced_1d(n);
    const Field field = detail::random_complex_field(points, 1, 7000 + n);
    std::vector<Complex> signal(n);
    for (std::size_t i = 0; i < n; ++i) signal[i] = field.values(i, 0);
    const std::vector<Complex> full = fft_radix2(signal);
    double ref_scale = 0.0;
    for (const auto& v : full) ref_scale = std::max(ref_scale, std::abs(v));
    for (const std::size_t m : {std::size_t{4}, n / 2, n}) {
      const CoeffVector got = nudft_forward(points, ModeSpec::fourier(m),
                                            field, Normalization::none);
      for (std::size_t j = 0; j < m; ++j)
        r.max_err = std::max(
            r.max_err, std::abs(got.values(j, 0) - full[j]) / ref_scale);
    }
  }
  r.pass = r.max_err < r.tolerance;
  return r;
}

inline CheckResult check_brute_force_agreement() {
  CheckResult r{"brute_force_agreement", false, 0.0, 1e-12,
                "matrix path vs literal summation on random clouds"};
  SplitMix64 rng(99);
  for (int instance = 0; instance < 40; ++instance) {
    const std::size_t d = 1 + rng.next_u64() % 3;
    const std::size_t n = 4 + rng.next_u64() % 61;
    const std::size_t m = 1 + rng.next_u64() % 4;
    const auto range = (rng.next_u64() & 1) ? FrequencyRange::symmetric
                                            : FrequencyRange::nonnegative;
    const PointSet points = gen_random_cloud(n, d, rng.next_u64());
    const Field field = detail::random_complex_field(points, 1, rng.next_u64());
    const ModeSpec modes = ModeSpec::fourier(m, d, range);
    const CoeffVector via_matrix =
        nudft_forward(points, modes, field, Normalization::unitary, false);
    const CoeffVector via_sum =
        brute_force_nudft(points, modes, field, Normalization::unitary);
    r.max_err = std::max(
        r.max_err, detail::normalized_max_diff(via_matrix.values, via_sum.values));
  }
  r.pass = r.max_err < r.tolerance;
  return r;
}

inline CheckResult check_adjoint_identity() {
  CheckResult r{"adjoint_identity", false, 0.0, 1e-12,
                "<V x, y> == <x, adjoint(V) y> on random clouds"};
  SplitMix64 rng(123);
  for (int instance = 0; instance < 8; ++instance) {
    const std::size_t n = 16 + rng.next_u64() % 48;
    const std::size_t m = 1 + rng.next_u64() % 12;
    const PointSet points = gen_random_cloud(n, 1, rng.next_u64());
    const SpectralMatrix v = build_fourier_matrix_1d(
        points, ModeSpec::fourier(m), Normalization::paper);
    const Field x = detail::random_complex_field(points, 1, rng.next_u64());
    CoeffVector y;
    y.mode_spec = v.mode_spec;
    y.values = detail::random_cmat(m, 1, rng.next_u64());

    const CoeffVector vx = complex_matvec(v, x);
    const Field vty = nudft_adjoint(v, y);
    Complex lhs{}, rhs{};
    for (std::size_t j = 0; j < m; ++j)
      lhs += vx.values(j, 0) * std::conj(y.values(j, 0));
    for (std::size_t k = 0; k < n; ++k)
      rhs += x.values(k, 0) * std::conj(vty.values(k, 0));
    const double scale = std::max(1.0, std::abs(lhs));
    r.max_err = std::max(r.max_err, std::abs(lhs - rhs) / scale);
  }
  r.pass = r.max_err < r.tolerance;
  return r;
}

inline CheckResult check_unitary_round_trip(bool inject_error) {
  CheckResult r{"unitary_round_trip", false, 0.0, 1e-12,
                "full equispaced transform is unitary and invertible"};
  const std::size_t n = 64;
  const PointSet points = gen_equispaced_1d(n);
  SpectralMatrix v =
      build_fourier_matrix_1d(points, ModeSpec::fourier(n), Normalization::unitary);
  if (inject_error) {
    for (auto& e : v.entries.a) e *= 1.0 + 1e-6;
    r.detail += " [normalization deliberately corrupted]";
  }
  // ||V V^H - I||_max
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      Complex acc{};
      for (std::size_t k = 0; k < n; ++k)
        acc += v.entries(i, k) * std::conj(v.entries(j, k));
      if (i == j) acc -= 1.0;
      r.max_err = std::max(r.max_err, std::abs(acc));
    }
  }
  // round trip on a random field
  const Field x = detail::random_complex_field(points, 2, 321);
  CoeffVector coeffs = complex_matvec(v, x);
  const Field back = nudft_adjoint(v, coeffs);
  r.max_err = std::max(r.max_err, max_abs_diff(back.values, x.values));
  r.pass = r.max_err < r.tolerance;
  return r;
}

inline CheckResult check_layout_2d() {
  CheckResult r{"layout_2d", false, 0.0, 1e-14,
                "2D row layout: row j pairs frequency (j mod m, floor(j/m))"};
  for (const std::size_t m : {2, 3, 4}) {
    const PointSet points = gen_random_cloud(9, 2, 1234 + m);
    const SpectralMatrix v = build_fourier_matrix_nd(
        points, ModeSpec::fourier(m, 2), Normalization::paper);
    const double c =
        normalization_constant(Normalization::paper, points.n_points(), 2);
    for (std::size_t j = 0; j < m * m; ++j) {
      for (std::size_t k = 0; k < points.n_points(); ++k) {
        const double phase =
            static_cast<double>(j % m) * points.coords(k, 0) +
            static_cast<double>(j / m) * points.coords(k, 1);
        const Complex expected(c * std::cos(-kTwoPi * phase),
                               c * std::sin(-kTwoPi * phase));
        r.max_err =
            std::max(r.max_err, std::abs(v.entries(j, k) - expected));
      }
    }
  }
  r.pass = r.max_err < r.tolerance;
  return r;
}

inline CheckResult check_lattice_agreement() {
  CheckResult r{"lattice_agreement", false, 0.0, 1e-12,
                "separable lattice product vs general dense transform"};
  const LatticeAxes axes = gen_lattice_tanh_2d(12, 16, 0.4, 2.0);
  const std::size_t m = 3;
  const LatticeFactors factors =
      build_lattice_factors(axes.axis0, axes.axis1, m, Normalization::unitary);
  if (factors.stored_entry_count() != m * (axes.axis0.size() + axes.axis1.size())) {
    r.detail = "stored factor entry count mismatch";
    r.max_err = 1.0;
    return r;
  }
  SplitMix64 rng(555);
  CMat field(axes.axis0.size(), axes.axis1.size());
  for (auto& v : field.a)
    v = Complex(2.0 * rng.next_double() - 1.0, 2.0 * rng.next_double() - 1.0);
  const CMat lattice = lattice_forward(factors, field);

  const PointSet product = lattice_product_points(axes.axis0, axes.axis1);
  Field flat;
  flat.point_fingerprint = product.fingerprint();
  flat.values = CMat(product.n_points(), 1);
  for (std::size_t i = 0; i < field.size(); ++i) flat.values.a[i] = field.a[i];
  const CoeffVector general = nudft_forward(
      product, ModeSpec::fourier(m, 2), flat, Normalization::unitary, false);
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b)
      r.max_err = std::max(r.max_err, std::abs(lattice(a, b) -
                                               general.values(a + m * b, 0)));
  r.pass = r.max_err < r.tolerance;
  return r;
}

inline CheckResult check_sh_projection() {
  CheckResult r{"sh_projection", false, 0.0, 1e-8,
                "weighted projection of a sampled harmonic is a unit vector"};
  const std::size_t n_theta = 16;
  const std::size_t l_max = 6;
  const PointSet grid = equiangular_sphere_grid(n_theta);
  const QuadratureWeights weights = dh_quadrature_weights(n_theta);
  const SpectralMatrix v = build_sh_matrix(grid, l_max);
  const std::size_t target = sh_flat_from_lm(3, 2);
  Field samples;
  samples.point_fingerprint = grid.fingerprint();
  samples.values = CMat(grid.n_points(), 1);
  for (std::size_t k = 0; k < grid.n_points(); ++k)
    samples.values(k, 0) = std::conj(v.entries(target, k));  // Y_3^2 itself
  const CoeffVector coeffs = sh_forward(grid, l_max, samples, weights);
  for (std::size_t j = 0; j < coeffs.values.rows; ++j) {
    const Complex expected = j == target ? Complex(1.0, 0.0) : Complex{};
    r.max_err = std::max(r.max_err, std::abs(coeffs.values(j, 0) - expected));
  }
  r.pass = r.max_err < r.tolerance;
  return r;
}

inline CheckResult check_dh_round_trip() {
  CheckResult r{"dh_round_trip", false, 0.0, 1e-8,
                "synthesize band-limited coefficients, project them back"};
  const std::size_t n_theta = 32;
  const std::size_t l_max = 8;
  const PointSet grid = equiangular_sphere_grid(n_theta);
  const QuadratureWeights weights = dh_quadrature_weights(n_theta);
  const SpectralMatrix v = build_sh_matrix(grid, l_max);
  SplitMix64 rng(777);
  CoeffVector coeffs;
  coeffs.mode_spec = v.mode_spec;
  coeffs.values = CMat(l_max * l_max, 1);
  for (auto& c : coeffs.values.a)
    c = Complex(2.0 * rng.next_double() - 1.0, 2.0 * rng.next_double() - 1.0);
  const Field synth = sh_adjoint(v, coeffs);
  const CoeffVector back = sh_forward(grid, l_max, synth, weights);
  r.max_err = detail::normalized_max_diff(back.values, coeffs.values);
  r.pass = r.max_err < r.tolerance;
  return r;
}

inline CheckResult check_gradient() {
  CheckResult r{"gradient_check", false, 0.0, 1e-5,
                "analytic gradients vs central finite differences"};
  ModelConfig cfg;
  cfg.width = 4;
  cfg.n_layers = 2;
  cfg.modes = ModeSpec::fourier(5, 1, FrequencyRange::symmetric);
  cfg.seed = 31;
  const PointSet points = gen_contracting_expanding_1d(16, 0.5, 1.1);
  Model model = init_model(cfg, points.dim());
  // O(1) parameter scales so probed gradients are well conditioned
  SplitMix64 rng(17);
  for (auto* slot : param_slots(model.params))
    *slot = 0.5 * (2.0 * rng.next_double() - 1.0);
  Dataset ds = make_task_dataset(TaskKind::derivative, points, 2, 1, 0, 5);
  const GradCheckResult gc = gradient_check(model, points, ds.train[0], 8,
                                            1e-6);
  r.max_err = gc.max_rel_error;
  r.detail += " (" + std::to_string(gc.n_probed) + " entries probed)";
  r.pass = r.max_err < r.tolerance && gc.n_probed >= 50;
  return r;
}

inline std::vector<CheckResult> run_validation(bool inject_error = false) {
  std::vector<CheckResult> results;
  results.push_back(check_fft_equivalence());
  results.push_back(check_brute_force_agreement());
  results.push_back(check_adjoint_identity());
  results.push_back(check_unitary_round_trip(inject_error));
  results.push_back(check_layout_2d());
  results.push_back(check_lattice_agreement());
  results.push_back(check_sh_projection());
  results.push_back(check_dh_round_trip());
  results.push_back(check_gradient());
  return results;
}

}  // namespace dse
