#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include <spectral_forge/errors.hpp>
#include <spectral_forge/lambert_w.hpp>
#include <spectral_forge/semiclassical.hpp>

using namespace spectral_forge;
using namespace spectral_forge::semiclassical;

constexpr double kTwoPi = 2.0 * std::numbers::pi;

TEST_CASE("lambert w") {
  CHECK(lambert_w0(0.0) == 0.0);
  CHECK(lambert_w0(1.0) == doctest::Approx(0.56714329040978387).epsilon(1e-14));
  CHECK(lambert_w0(10.0) == doctest::Approx(1.7455280027406994).epsilon(1e-14));
  CHECK(lambert_w0(-0.3) == doctest::Approx(-0.48940222718021493).epsilon(1e-13));
  CHECK(lambert_w0(-1.0 / std::numbers::e) == doctest::Approx(-1.0).epsilon(1e-6));
  for (double z : {1e-8, 0.5, 3.0, 1e3, 1e12}) {
    const double w = lambert_w0(z);
    CHECK(w * std::exp(w) == doctest::Approx(z).epsilon(1e-14));
  }
  CHECK_THROWS_AS(lambert_w0(-1.0), DomainError);
}

// Reference values: mpmath quadrature at 30 digits.
TEST_CASE("prime profile integral") {
  CHECK(prime_wkb_x_of_v(100.0, 2.0) == doctest::Approx(4.5664977272724488).epsilon(1e-10));
  CHECK(prime_wkb_x_of_v(1000.0, 2.0) == doctest::Approx(9.9130444365240317).epsilon(1e-10));
  CHECK(prime_wkb_x_of_v(100.0, 3.0, 1) == doctest::Approx(5.0995587674719432).epsilon(1e-10));
  CHECK(prime_wkb_x_of_v(2.0, 2.0) == 0.0);
  CHECK_THROWS_AS(prime_wkb_x_of_v(50.0, 1.0), DomainError);
  CHECK_THROWS_AS(prime_wkb_x_of_v(1.5, 2.0), DomainError);
  const double loose = prime_wkb_x_of_v(500.0, 2.0, 0, 1e-6);
  const double tight = prime_wkb_x_of_v(500.0, 2.0, 0, 1e-12);
  CHECK(loose == doctest::Approx(tight).epsilon(1e-6));
}

TEST_CASE("zeta closed form") {
  CHECK(zeta_wkb_x_of_v(50.0, kTwoPi) == doctest::Approx(3.4308873267179936).epsilon(1e-13));
  CHECK(zeta_wkb_x_of_v(50.0, 7.0) == doctest::Approx(3.4299333086704462).epsilon(1e-13));
  CHECK(zeta_wkb_x_of_v(50.0, kTwoPi * (1 + 1e-8)) == zeta_wkb_x_of_v(50.0, kTwoPi));
  // Small-argument series branch stays continuous.
  const double v = kTwoPi + 1e-6;
  CHECK(zeta_wkb_x_of_v(v, kTwoPi) > 0.0);
  CHECK(zeta_wkb_x_of_v(v * (1 + 1e-9), kTwoPi) > zeta_wkb_x_of_v(v, kTwoPi));
}

TEST_CASE("asymptote") {
  CHECK(zeta_wkb_asymptote(0.0) == doctest::Approx(std::numbers::pi * std::exp(2.0) / 2.0));
  CHECK(zeta_wkb_asymptote(-5.0) == zeta_wkb_asymptote(5.0));
  const double x = 100.0, w = lambert_w0(std::sqrt(std::numbers::pi / 2.0) * x / std::numbers::e);
  CHECK(zeta_wkb_asymptote(x) == doctest::Approx(std::numbers::pi * std::numbers::pi * x * x / (4 * w * w)));
}

TEST_CASE("band classification") {
  const double x = 20.0, l1 = std::log(x), l2 = std::log(x * std::log(x));
  CHECK(prime_wkb_bounds_check(x, 2.0 + 0.5 * x * x * l1 * l1, 2.0) == Band::Below);
  CHECK(prime_wkb_bounds_check(x, 2.0 + x * x * (l1 * l1 + l2 * l2) / 2, 2.0) == Band::Inside);
  CHECK(prime_wkb_bounds_check(x, 2.0 + 2 * x * x * l2 * l2, 2.0) == Band::Above);
  CHECK_THROWS_AS(prime_wkb_bounds_check(5.0, 100.0, 2.0), DomainError);
}

TEST_CASE("profile inversion") {
  const auto p = wkb_profile(WKBKind::Zeta, kTwoPi, 500.0, 300);
  for (double v : {7.0, 40.0, 320.0}) {
    const double x = zeta_wkb_x_of_v(v, kTwoPi);
    CHECK(p.v_of_x(x) == doctest::Approx(v).epsilon(1e-12));
    CHECK(p.v_of_x(-x) == p.v_of_x(x));
    CHECK(p.v_of_x(x, false) == doctest::Approx(v).epsilon(1e-4));
  }
  CHECK(p.v_of_x(0.0) == doctest::Approx(kTwoPi));
  CHECK_THROWS_AS(p.v_of_x(p.x_max() * 1.01), DomainError);

  const auto q = wkb_profile(WKBKind::Primes, kDefaultPrimeE0, 300.0, 100);
  CHECK(q.m_max() == 8);
  CHECK(q.v_of_x(prime_wkb_x_of_v(100.0, 2.0, 8)) == doctest::Approx(100.0).epsilon(1e-10));
}

TEST_CASE("profile tables") {
  CHECK_THROWS_AS(WKBProfile(WKBKind::Zeta, kTwoPi, 0, {7.0, 6.9}, {0.1, 0.2}), ValidationError);
  const auto p = wkb_profile(WKBKind::Primes, 2.0, 200.0, 50, 0, 2);
  CHECK(p.v_table() == wkb_profile(WKBKind::Primes, 2.0, 200.0, 50, 0, 1).v_table());
  std::stringstream io;
  write_profile_csv(io, p);
  const auto back = read_profile_csv(io);
  CHECK(back.x_table() == p.x_table());
  CHECK(back.e0() == p.e0());
  CHECK(back.kind() == WKBKind::Primes);

  const auto s = sample_profile(p, 2.0, 0.5, 1);
  CHECK(s.size() == 9);
  CHECK(s.values.front() == s.values.back());
  CHECK(s.method == PotentialMethod::WKBPrimes);
  CHECK(s.v_infinity == p.v_max());
}

TEST_CASE("turning point exponents") {
  auto slope = [](double e0) {
    const auto p = wkb_profile(WKBKind::Zeta, e0, 50.0, 800);
    return std::log((p.v_of_x(1e-3) - e0) / (p.v_of_x(1e-4) - e0)) / std::log(10.0);
  };
  CHECK(slope(kTwoPi) == doctest::Approx(2.0 / 3.0).epsilon(0.05));
  CHECK(slope(7.0) == doctest::Approx(2.0).epsilon(0.02));
}
