#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "dse/dse.hpp"

using namespace dse;

TEST_CASE("equispaced points sit at k/N") {
  const PointSet p = gen_equispaced_1d(4);
  REQUIRE(p.n_points() == 4);
  CHECK(p.coords(0, 0) == 0.0);
  CHECK(p.coords(1, 0) == 0.25);
  CHECK(p.coords(2, 0) == 0.5);
  CHECK(p.coords(3, 0) == 0.75);
  CHECK(p.geometry == Geometry::cartesian);
}

TEST_CASE("contracting-expanding frozen instance") {
  const PointSet p = gen_contracting_expanding_1d(5, 0.5, 2.0);
  REQUIRE(p.n_points() == 5);
  CHECK(p.coords(0, 0) == 0.0);
  CHECK(p.coords(1, 0) == Catch::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(p.coords(2, 0) == 0.5);
  CHECK(p.coords(3, 0) == Catch::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(p.coords(4, 0) == 1.0);
}

TEST_CASE("contracting-expanding gap ratios are geometric on each side") {
  const double ratio = 1.7;
  const PointSet p = gen_contracting_expanding_1d(11, 0.5, ratio);
  REQUIRE(p.n_points() == 11);
  CHECK(p.coords(0, 0) == 0.0);
  CHECK(p.coords(10, 0) == 1.0);
  // sorted strictly
  for (std::size_t i = 1; i < 11; ++i)
    CHECK(p.coords(i, 0) > p.coords(i - 1, 0));
  // gaps grow by exactly `ratio` moving away from the center on each side
  const std::size_t c = 5;  // center index for n=11, center=0.5
  CHECK(p.coords(c, 0) == Catch::Approx(0.5).margin(1e-12));
  for (std::size_t i = c + 2; i < 11; ++i) {
    const double g0 = p.coords(i - 1, 0) - p.coords(i - 2, 0);
    const double g1 = p.coords(i, 0) - p.coords(i - 1, 0);
    CHECK(g1 / g0 == Catch::Approx(ratio).epsilon(1e-10));
  }
  for (std::size_t i = 0; i + 2 <= c; ++i) {
    const double g0 = p.coords(i + 1, 0) - p.coords(i, 0);
    const double g1 = p.coords(i + 2, 0) - p.coords(i + 1, 0);
    CHECK(g0 / g1 == Catch::Approx(ratio).epsilon(1e-10));
  }
}

TEST_CASE("contracting-expanding config validation") {
  CHECK_THROWS_AS(gen_contracting_expanding_1d(2, 0.5, 2.0), ConfigError);
  CHECK_THROWS_AS(gen_contracting_expanding_1d(5, -0.1, 2.0), ConfigError);
  CHECK_THROWS_AS(gen_contracting_expanding_1d(5, 1.1, 2.0), ConfigError);
  CHECK_THROWS_AS(gen_contracting_expanding_1d(5, 0.5, 1.0), ConfigError);
  CHECK_THROWS_AS(gen_contracting_expanding_1d(5, 0.5, 0.5), ConfigError);
}

TEST_CASE("tanh-compressed axis reduces to equispaced at zero sharpness") {
  const auto axis = gen_lattice_tanh_axis(9, 0.3, 0.0);
  REQUIRE(axis.size() == 9);
  for (std::size_t i = 0; i < 9; ++i)
    CHECK(axis[i] == Catch::Approx(static_cast<double>(i) / 8.0)
                         .margin(1e-12));
}

TEST_CASE("tanh-compressed axis concentrates points near the focus") {
  const double focus = 0.5;
  const auto axis = gen_lattice_tanh_axis(33, focus, 3.0);
  CHECK(axis.front() == 0.0);
  CHECK(axis.back() == 1.0);
  for (std::size_t i = 1; i < axis.size(); ++i)
    CHECK(axis[i] > axis[i - 1]);
  // the gap nearest the focus is smaller than the equispaced gap,
  // the gap at the boundary is larger
  const double eq_gap = 1.0 / 32.0;
  double focus_gap = 1.0, edge_gap = 0.0;
  for (std::size_t i = 1; i < axis.size(); ++i) {
    const double mid = 0.5 * (axis[i] + axis[i - 1]);
    const double gap = axis[i] - axis[i - 1];
    if (std::abs(mid - focus) < 0.1) focus_gap = std::min(focus_gap, gap);
    if (mid < 0.08 || mid > 0.92) edge_gap = std::max(edge_gap, gap);
  }
  CHECK(focus_gap < eq_gap);
  CHECK(edge_gap > eq_gap);
}

TEST_CASE("lattice product points order axis 1 fastest") {
  const std::vector<double> a0{0.0, 0.5};
  const std::vector<double> a1{0.1, 0.2, 0.3};
  const PointSet grid = lattice_product_points(a0, a1);
  REQUIRE(grid.n_points() == 6);
  // row n = n0 * N1 + n1
  CHECK(grid.coords(0, 0) == 0.0);
  CHECK(grid.coords(0, 1) == 0.1);
  CHECK(grid.coords(1, 0) == 0.0);
  CHECK(grid.coords(1, 1) == 0.2);
  CHECK(grid.coords(3, 0) == 0.5);
  CHECK(grid.coords(3, 1) == 0.1);
  CHECK(grid.coords(5, 0) == 0.5);
  CHECK(grid.coords(5, 1) == 0.3);
}

TEST_CASE("random clouds are deterministic, bounded, and seed-sensitive") {
  const PointSet a = gen_random_cloud(50, 3, 11);
  const PointSet b = gen_random_cloud(50, 3, 11);
  const PointSet c = gen_random_cloud(50, 3, 12);
  REQUIRE(a.dim() == 3);
  CHECK(a.fingerprint() == b.fingerprint());
  CHECK(a.fingerprint() != c.fingerprint());
  for (const double x : a.coords.a) {
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
  }
  CHECK_NOTHROW(a.require_unit_cube());
}

TEST_CASE("uniform sphere samples are valid and deterministic") {
  const PointSet a = gen_sphere_uniform(200, 5);
  const PointSet b = gen_sphere_uniform(200, 5);
  CHECK(a.fingerprint() == b.fingerprint());
  CHECK(a.geometry == Geometry::spherical);
  CHECK_NOTHROW(a.require_sphere());
  // both hemispheres get hit
  std::size_t north = 0;
  for (std::size_t k = 0; k < 200; ++k)
    if (a.coords(k, 0) < kPi / 2.0) ++north;
  CHECK(north > 50);
  CHECK(north < 150);
}

TEST_CASE("band-limited fields match their stored spectrum") {
  const PointSet points = gen_random_cloud(30, 1, 42);
  const std::size_t max_freq = 3;
  const BandLimitedField blf =
      gen_random_band_limited_field(points, max_freq, 2, 7);
  REQUIRE(blf.coeffs.rows == 2 * max_freq + 1);
  REQUIRE(blf.coeffs.cols == 2);
  REQUIRE(blf.field.values.rows == 30);

  // literal re-evaluation: x(p) = sum_q a_q e^{+2 pi i q p}
  for (std::size_t k = 0; k < 30; ++k)
    for (std::size_t ch = 0; ch < 2; ++ch) {
      std::complex<double> acc{0, 0};
      for (long long q = -3; q <= 3; ++q) {
        const double ang = 2.0 * kPi * static_cast<double>(q) *
                           points.coords(k, 0);
        acc += blf.coeffs(static_cast<std::size_t>(q + 3), ch) *
               std::complex<double>{std::cos(ang), std::sin(ang)};
      }
      CHECK(std::abs(blf.field.values(k, ch) - acc) < 1e-12);
    }
}

TEST_CASE("band-limited coefficients are Hermitian so fields are real") {
  const PointSet points = gen_random_cloud(25, 2, 90);
  const BandLimitedField blf =
      gen_random_band_limited_field(points, 2, 1, 13);
  // a_{-q} = conj(a_q) for the multi-index reversal
  const std::size_t side = 5, total = 25;
  for (std::size_t f = 0; f < total; ++f) {
    const std::size_t q0 = f % side, q1 = f / side;
    const std::size_t nf = (side - 1 - q0) + side * (side - 1 - q1);
    CHECK(std::abs(blf.coeffs(f, 0) - std::conj(blf.coeffs(nf, 0))) <
          1e-15);
  }
  for (const auto& z : blf.field.values.a) CHECK(std::abs(z.imag()) < 1e-12);
}

TEST_CASE("derivative evaluation matches finite differences") {
  const PointSet points = gen_random_cloud(12, 1, 21);
  const BandLimitedField blf =
      gen_random_band_limited_field(points, 4, 1, 22);
  const RMat& coords = points.coords;
  const double h = 1e-6;
  PointSet plus = points, minus = points;
  for (std::size_t k = 0; k < 12; ++k) {
    plus.coords(k, 0) = coords(k, 0) + h;
    minus.coords(k, 0) = coords(k, 0) - h;
  }
  const CMat d = eval_band_limited_derivative_1d(blf.coeffs, 4, points).values;
  const CMat fp = eval_band_limited(blf.coeffs, 4, 1, plus).values;
  const CMat fm = eval_band_limited(blf.coeffs, 4, 1, minus).values;
  for (std::size_t k = 0; k < 12; ++k) {
    const std::complex<double> fd =
        (fp(k, 0) - fm(k, 0)) / std::complex<double>{2.0 * h, 0.0};
    CHECK(std::abs(d(k, 0) - fd) < 1e-5);
  }
}

TEST_CASE("task datasets are deterministic and correctly paired") {
  const PointSet points = gen_random_cloud(20, 1, 31);
  const Dataset a =
      make_task_dataset(TaskKind::identity, points, 3, 4, 2, 100);
  const Dataset b =
      make_task_dataset(TaskKind::identity, points, 3, 4, 2, 100);
  REQUIRE(a.train.size() == 4);
  REQUIRE(a.test.size() == 2);
  for (std::size_t s = 0; s < 4; ++s) {
    CHECK(max_abs_diff(a.train[s].input, b.train[s].input) == 0.0);
    // identity task: target equals input
    CHECK(max_abs_diff(a.train[s].input, a.train[s].target) == 0.0);
  }
  // train and test draws differ
  CHECK(max_abs_diff(a.train[0].input, a.test[0].input) > 1e-6);

  const Dataset d =
      make_task_dataset(TaskKind::derivative, points, 3, 2, 1, 100);
  // derivative targets have the scale of 2 pi f times the input
  double in_norm = 0.0, tgt_norm = 0.0;
  for (const double x : d.train[0].input.a) in_norm += std::abs(x);
  for (const double x : d.train[0].target.a) tgt_norm += std::abs(x);
  CHECK(tgt_norm > in_norm);

  const PointSet p2 = gen_random_cloud(20, 2, 32);
  CHECK_THROWS_AS(make_task_dataset(TaskKind::derivative, p2, 3, 1, 1, 1),
                  ConfigError);
}
