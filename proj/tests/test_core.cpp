#include <catch2/catch_amalgamated.hpp>

#include <complex>
#include <cstring>
#include <string>
#include <vector>

#include "dse/dse.hpp"

using namespace dse;

TEST_CASE("mode spec counts and validation") {
  CHECK(ModeSpec::fourier(17).m_total() == 17);
  CHECK(ModeSpec::fourier(17, 2).m_total() == 289);
  CHECK(ModeSpec::fourier(4, 3).m_total() == 64);
  CHECK(ModeSpec::spherical(8).m_total() == 64);
  CHECK(ModeSpec::spherical(1).m_total() == 1);
  CHECK_THROWS_AS(ModeSpec::fourier(0), ConfigError);
  CHECK_THROWS_AS(ModeSpec::fourier(1, 0), ConfigError);
  CHECK_THROWS_AS(ModeSpec::spherical(0), ConfigError);
  // 2^22 modes per axis cubed exceeds the 64-bit flat index space
  CHECK_THROWS_AS(ModeSpec::fourier(std::size_t{1} << 22, 3).m_total(),
                  ConfigError);
}

TEST_CASE("flat mode index round trip, axis 0 fastest") {
  const std::size_t m = 3, dim = 3;
  for (std::size_t j = 0; j < 27; ++j) {
    const auto multi = unflatten_mode_index(j, m, dim);
    CHECK(flatten_mode_index(multi, m) == j);
  }
  // j = j0 + m*j1 + m^2*j2
  CHECK(flatten_mode_index({2, 0, 0}, 3) == 2);
  CHECK(flatten_mode_index({0, 1, 0}, 3) == 3);
  CHECK(flatten_mode_index({0, 0, 1}, 3) == 9);
  CHECK(flatten_mode_index({1, 2, 1}, 3) == 1 + 6 + 9);
  CHECK_THROWS_AS(flatten_mode_index({3, 0, 0}, 3), IndexError);
  CHECK_THROWS_AS(unflatten_mode_index(27, 3, 3), IndexError);
}

TEST_CASE("frequency mapping for both ranges") {
  for (std::size_t j = 0; j < 17; ++j)
    CHECK(frequency_for_index(j, 17, FrequencyRange::nonnegative) ==
          static_cast<long long>(j));
  // symmetric, m = 17: {0..8, -8..-1}
  const std::vector<long long> expect{0, 1, 2, 3, 4,  5,  6,  7,  8,
                                      -8, -7, -6, -5, -4, -3, -2, -1};
  for (std::size_t j = 0; j < 17; ++j)
    CHECK(frequency_for_index(j, 17, FrequencyRange::symmetric) == expect[j]);
  // symmetric, even m = 4: {0, 1, -2, -1}
  CHECK(frequency_for_index(0, 4, FrequencyRange::symmetric) == 0);
  CHECK(frequency_for_index(1, 4, FrequencyRange::symmetric) == 1);
  CHECK(frequency_for_index(2, 4, FrequencyRange::symmetric) == -2);
  CHECK(frequency_for_index(3, 4, FrequencyRange::symmetric) == -1);
  CHECK_THROWS_AS(frequency_for_index(17, 17, FrequencyRange::nonnegative),
                  IndexError);
}

TEST_CASE("point set domain validation") {
  PointSet ok;
  ok.geometry = Geometry::cartesian;
  ok.coords = RMat(2, 2);
  ok.coords(0, 0) = 0.0;
  ok.coords(0, 1) = 1.0;
  ok.coords(1, 0) = 0.5;
  ok.coords(1, 1) = 0.25;
  CHECK_NOTHROW(ok.require_unit_cube());

  PointSet bad = ok;
  bad.coords(1, 1) = 1.0 + 1e-9;
  CHECK_THROWS_AS(bad.require_unit_cube(), DomainError);
  bad.coords(1, 1) = -0.1;
  CHECK_THROWS_AS(bad.require_unit_cube(), DomainError);

  PointSet sph;
  sph.geometry = Geometry::spherical;
  sph.coords = RMat(2, 2);
  sph.coords(0, 0) = 0.0;               // theta
  sph.coords(0, 1) = 0.0;               // phi
  sph.coords(1, 0) = 3.14159265358979;  // just under pi
  sph.coords(1, 1) = 6.28318;           // just under 2 pi
  CHECK_NOTHROW(sph.require_sphere());
  sph.coords(1, 1) = 2.0 * kPi;  // phi = 2 pi excluded
  CHECK_THROWS_AS(sph.require_sphere(), DomainError);
  sph.coords(1, 1) = 0.0;
  sph.coords(1, 0) = kPi + 1e-9;
  CHECK_THROWS_AS(sph.require_sphere(), DomainError);
}

TEST_CASE("point fingerprints detect any coordinate change") {
  const PointSet a = gen_equispaced_1d(64);
  const PointSet b = gen_equispaced_1d(64);
  CHECK(a.fingerprint() == b.fingerprint());
  PointSet c = a;
  // flip the last bit of one coordinate
  double v = c.coords(31, 0);
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  bits ^= 1u;
  std::memcpy(&v, &bits, 8);
  c.coords(31, 0) = v;
  CHECK(a.fingerprint() != c.fingerprint());
}

TEST_CASE("splitmix64 matches frozen reference draws") {
  SplitMix64 r0(0);
  CHECK(r0.next_u64() == 0xe220a8397b1dcdafull);
  CHECK(r0.next_u64() == 0x6e789e6aa1b965f4ull);
  CHECK(r0.next_u64() == 0x06c45d188009454full);
  SplitMix64 r1(1);
  CHECK(r1.next_u64() == 0x910a2dec89025cc1ull);
  CHECK(r1.next_u64() == 0xbeeb8da1658eec67ull);
  SplitMix64 r42(42);
  CHECK(r42.next_u64() == 0xbdd732262feb6e95ull);
  SplitMix64 rbeef(0xDEADBEEFull);
  CHECK(rbeef.next_u64() == 0x4adfb90f68c9eb9bull);

  SplitMix64 rd(42);
  CHECK(rd.next_double() == Catch::Approx(0.7415648787718233).epsilon(1e-15));
  for (int i = 0; i < 1000; ++i) {
    const double u = rd.next_double();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("gaussian pairs are deterministic and finite") {
  SplitMix64 a(7), b(7);
  for (int i = 0; i < 100; ++i) {
    double a0, a1, b0, b1;
    a.next_gaussian_pair(a0, a1);
    b.next_gaussian_pair(b0, b1);
    CHECK(a0 == b0);
    CHECK(a1 == b1);
    CHECK(std::isfinite(a0));
    CHECK(std::isfinite(a1));
  }
}

TEST_CASE("error hierarchy") {
  CHECK_THROWS_AS(throw SizeError("x"), ShapeError);
  CHECK_THROWS_AS(throw ShapeError("x"), Error);
  CHECK_THROWS_AS(throw ConfigError("x"), Error);
  CHECK_THROWS_AS(throw DomainError("x"), Error);
  CHECK_THROWS_AS(throw IoError("x"), Error);
  CHECK_THROWS_AS(throw BindingError("x"), Error);
  CHECK_THROWS_AS(throw IndexError("x"), Error);
  CHECK_THROWS_AS(throw NumericError("x"), Error);
  CHECK_THROWS_AS(throw Error("x"), std::runtime_error);
}

namespace {
std::vector<std::string> g_captured;
void capture_handler(std::string_view msg) { g_captured.emplace_back(msg); }
}  // namespace

TEST_CASE("diagnostics channel can be redirected and restored") {
  g_captured.clear();
  set_diagnostic_handler(&capture_handler);
  emit_diagnostic("hello");
  set_diagnostic_handler(nullptr);
  REQUIRE(g_captured.size() == 1);
  CHECK(g_captured[0] == "hello");
}

TEST_CASE("fnv1a64 frozen values") {
  // Standard FNV-1a test vectors
  CHECK(fnv1a64("", 0) == 0xcbf29ce484222325ull);
  const char* a = "a";
  CHECK(fnv1a64(a, 1) == 0xaf63dc4c8601ec8cull);
}

TEST_CASE("matrix layout and products") {
  RMat m(2, 3);
  for (std::size_t r = 0; r < 2; ++r)
    for (std::size_t c = 0; c < 3; ++c) m(r, c) = 10.0 * r + c;
  CHECK(m.a[0] == 0.0);
  CHECK(m.a[3] == 10.0);  // row-major: second row starts at index cols
  CHECK(m.a[5] == 12.0);

  RMat b(3, 2);
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t c = 0; c < 2; ++c) b(r, c) = r + 100.0 * c;
  const RMat p = matmul(m, b);
  REQUIRE(p.rows == 2);
  REQUIRE(p.cols == 2);
  // hand-computed 2x3 * 3x2
  CHECK(p(0, 0) == Catch::Approx(0 * 0 + 1 * 1 + 2 * 2));
  CHECK(p(1, 1) == Catch::Approx(10 * 100 + 11 * 101 + 12 * 102));

  RMat wrong(4, 2);
  CHECK_THROWS_AS(matmul(m, wrong), ShapeError);
}

TEST_CASE("complex products against manual loops") {
  SplitMix64 rng(5);
  CMat a(4, 6);
  CMat b(4, 3);
  for (auto& z : a.a) {
    double g0, g1;
    rng.next_gaussian_pair(g0, g1);
    z = {g0, g1};
  }
  for (auto& z : b.a) {
    double g0, g1;
    rng.next_gaussian_pair(g0, g1);
    z = {g0, g1};
  }
  const CMat ab = adjoint_matmul(a, b);  // conj(a)^T * b, 6x3
  REQUIRE(ab.rows == 6);
  REQUIRE(ab.cols == 3);
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      std::complex<double> acc{0, 0};
      for (std::size_t k = 0; k < 4; ++k) acc += std::conj(a(k, i)) * b(k, j);
      CHECK(std::abs(ab(i, j) - acc) < 1e-14);
    }

  const RMat re = real_adjoint_matmul(a, b);
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      CHECK(re(i, j) == Catch::Approx(ab(i, j).real()).margin(1e-14));
}

TEST_CASE("matvec and the threaded variant agree bit for bit") {
  SplitMix64 rng(9);
  CMat a(37, 53);
  std::vector<Complex> x(53);
  for (auto& z : a.a) {
    double g0, g1;
    rng.next_gaussian_pair(g0, g1);
    z = {g0, g1};
  }
  for (auto& z : x) {
    double g0, g1;
    rng.next_gaussian_pair(g0, g1);
    z = {g0, g1};
  }
  const auto serial = matvec(a, x);
  for (unsigned t = 1; t <= 4; ++t) {
    const auto par = matvec_threaded(a, x, t);
    REQUIRE(par.size() == serial.size());
    for (std::size_t i = 0; i < serial.size(); ++i) {
      CHECK(par[i].real() == serial[i].real());
      CHECK(par[i].imag() == serial[i].imag());
    }
  }
  std::vector<Complex> short_x(10);
  CHECK_THROWS_AS(matvec(a, short_x), ShapeError);
}
