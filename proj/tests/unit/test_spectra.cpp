#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <spectral_forge/errors.hpp>
#include <spectral_forge/spectra.hpp>

using namespace spectral_forge;
using namespace spectral_forge::spectra;

TEST_CASE("first primes and next value") {
  const auto s = primes_upto_n(10);
  REQUIRE(s.size() == 10);
  CHECK(s[0] == 2.0);
  CHECK(s.back() == 29.0);
  CHECK(*s.next_value() == 31.0);
  CHECK(prime_count(1000) == 168);
  CHECK(sieve_primes(30).size() == 10);
}

TEST_CASE("spectrum validation") {
  CHECK_THROWS_AS(Spectrum(SpectrumKind::Custom, {1.0, 1.0}), ValidationError);
  CHECK_THROWS_AS(Spectrum(SpectrumKind::Custom, {2.0, 1.0}), ValidationError);
  CHECK_THROWS_AS(Spectrum(SpectrumKind::Custom, {1.0, NAN}), ValidationError);
  CHECK_THROWS_AS(Spectrum(SpectrumKind::Primes, {2.0, 4.0}), ValidationError);
  CHECK_NOTHROW(Spectrum(SpectrumKind::Custom, {-4.0, -1.0}));
}

TEST_CASE("reference spectra") {
  const auto h = reference_spectrum(SpectrumKind::Harmonic, 4);
  CHECK(h[3] == 7.0);
  CHECK(*h.next_value() == 9.0);
  // Triangular well: even levels from Ai' zeros, odd from Ai zeros.
  const auto t = reference_spectrum(SpectrumKind::Triangular, 3);
  CHECK(t[0] == doctest::Approx(1.0187929716474711).epsilon(1e-13));
  CHECK(t[1] == doctest::Approx(2.3381074104597670).epsilon(1e-13));
  CHECK(airy_ai_prime_zero(3) == doctest::Approx(-4.8200992111787356).epsilon(1e-13));
}

TEST_CASE("zeta zero parsing") {
  std::istringstream ok("14.134725141734693\n21.022039638771555\n25.010857580145688\n");
  const auto s = parse_zeta_zeros(ok, 2);
  CHECK(s.size() == 2);
  CHECK(*s.next_value() == doctest::Approx(25.010857580145688));

  std::istringstream blank("14.1\n\n21.0\n");
  CHECK_THROWS_AS(parse_zeta_zeros(blank, 1), ParseError);
  std::istringstream descending("21.0\n14.1\n30.0\n");
  CHECK_THROWS_AS(parse_zeta_zeros(descending, 1), ValidationError);
  std::istringstream short_table("14.1\n");
  CHECK_THROWS_AS(parse_zeta_zeros(short_table, 1), InsufficientData);
}

TEST_CASE("bundled zero table") {
  const auto s = load_zeta_zeros(SPECTRAL_FORGE_ZEROS, 100);
  CHECK(s[0] == doctest::Approx(14.134725141734693).epsilon(1e-13));
  CHECK(s[99] == doctest::Approx(236.52422966581620).epsilon(1e-13));
}

TEST_CASE("moebius") {
  const int expected[] = {1, -1, -1, 0, -1, 1, -1, 0, 0, 1, -1, 0};
  for (int m = 1; m <= 12; ++m) CHECK(mobius(m) == expected[m - 1]);
  const CountingTables tables(1000);
  for (std::uint64_t m = 1; m <= 1000; ++m) CHECK(tables.mobius(m) == mobius(m));
}

TEST_CASE("li and R against mpmath") {
  CHECK(logarithmic_integral(10.0) == doctest::Approx(6.1655995047872979).epsilon(1e-13));
  CHECK(logarithmic_integral(2.0) == doctest::Approx(1.0451637801174928).epsilon(1e-13));
  CHECK(riemann_r(100.0) == doctest::Approx(25.781189556944104).epsilon(1e-12));
  CHECK(riemann_r(1000.0) == doctest::Approx(168.33467149057531).epsilon(1e-12));
}

TEST_CASE("zero counting") {
  const double e = 100.0, tp = 2.0 * std::numbers::pi;
  CHECK(zeta_counting_function(e) ==
        doctest::Approx(e / tp * std::log(e) - (1.0 + std::log(tp)) / tp * e + 0.875));
  const CountingTables tables(2, read_zero_table(SPECTRAL_FORGE_ZEROS));
  CHECK(tables.zeros_below(14.0) == 0);
  CHECK(tables.zeros_below(100.0) == 29);
}

namespace {

// li(2) + int_2^x dt / ln t by adaptive Gauss-Kronrod.
double li_oracle(double x) {
  using boost::math::quadrature::gauss_kronrod;
  return 1.0451637801174928 +
         gauss_kronrod<double, 31>::integrate([](double t) { return 1.0 / std::log(t); }, 2.0, x, 15, 1e-14);
}

int mobius_oracle(int m) {
  int sign = 1;
  for (int p = 2; p * p <= m; ++p) {
    if (m % p) continue;
    m /= p;
    if (m % p == 0) return 0;
    sign = -sign;
  }
  return m > 1 ? -sign : sign;
}

}  // namespace

TEST_CASE("li against quadrature") {
  for (double x : {2.5, 10.0, 97.0, 1e3, 1e5}) {
    CHECK(logarithmic_integral(x) == doctest::Approx(li_oracle(x)).epsilon(1e-12));
  }
}

TEST_CASE("truncated R against an independent sum") {
  for (double x : {3.0, 50.0, 777.0, 1e4}) {
    double r = 0.0;
    for (int m = 1; m <= static_cast<int>(std::floor(std::log2(x))); ++m) {
      const double y = std::pow(x, 1.0 / m);
      r += mobius_oracle(m) * (y < 2.0 ? logarithmic_integral(y) : li_oracle(y)) / m;
    }
    CHECK(riemann_r(x) == doctest::Approx(r).epsilon(1e-11));
  }
}

TEST_CASE("R tracks pi(x) up to its first large excursion") {
  // The exact R(x) leaves a band of 2 around pi(x) from x = 556 on.
  for (std::uint64_t x = 10; x <= 555; ++x) {
    CHECK(std::abs(riemann_r(static_cast<double>(x)) - static_cast<double>(prime_count(x))) <= 2.0);
  }
}
