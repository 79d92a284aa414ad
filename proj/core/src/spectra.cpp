#include "spectral_forge/spectra.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

#include <boost/math/special_functions/airy.hpp>
#include <boost/math/special_functions/expint.hpp>
#include <boost/math/tools/roots.hpp>

#include "spectral_forge/errors.hpp"

namespace spectral_forge::spectra {

std::string_view to_string(SpectrumKind kind) {
  switch (kind) {
    case SpectrumKind::Primes: return "primes";
    case SpectrumKind::ZetaZeros: return "zeta";
    case SpectrumKind::Harmonic: return "harmonic";
    case SpectrumKind::Triangular: return "triangular";
    case SpectrumKind::Custom: return "custom";
  }
  return "custom";
}

SpectrumKind spectrum_kind_from_string(std::string_view name) {
  if (name == "primes") return SpectrumKind::Primes;
  if (name == "zeta" || name == "zeta-zeros") return SpectrumKind::ZetaZeros;
  if (name == "harmonic") return SpectrumKind::Harmonic;
  if (name == "triangular") return SpectrumKind::Triangular;
  if (name == "custom") return SpectrumKind::Custom;
  throw ValidationError("unknown spectrum kind '" + std::string(name) + "'");
}

namespace {

constexpr double kFirstZetaZero = 14.13;

void check_kind_invariants(SpectrumKind kind, const std::vector<double>& v) {
  switch (kind) {
    case SpectrumKind::Primes: {
      const auto limit = static_cast<std::uint64_t>(v.back());
      const auto primes = sieve_primes(limit);
      if (primes.size() != v.size()) {
        throw ValidationError("prime spectrum is not the initial segment of the primes");
      }
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] != static_cast<double>(primes[i])) {
          throw ValidationError("prime spectrum entry " + std::to_string(i) + " is not the " +
                                std::to_string(i + 1) + "-th prime");
        }
      }
      break;
    }
    case SpectrumKind::ZetaZeros:
      if (v.front() < kFirstZetaZero) {
        throw ValidationError("zeta-zero spectrum starts below the first zero 14.1347");
      }
      break;
    case SpectrumKind::Harmonic:
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] != static_cast<double>(2 * i + 1)) {
          throw ValidationError("harmonic spectrum must be 1, 3, 5, ...");
        }
      }
      break;
    case SpectrumKind::Triangular:
    case SpectrumKind::Custom:
      break;
  }
}

}  // namespace

Spectrum::Spectrum(SpectrumKind kind, std::vector<double> values, std::optional<double> next_value)
    : kind_(kind), values_(std::move(values)), next_value_(next_value) {
  if (values_.empty()) throw ValidationError("spectrum must not be empty");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) throw ValidationError("spectrum contains a non-finite value");
    if (i > 0 && values_[i] == values_[i - 1]) {
      throw DegenerateError("spectrum repeats the eigenvalue " + std::to_string(values_[i]));
    }
    if (i > 0 && !(values_[i] > values_[i - 1])) {
      throw OrderError("spectrum values must be strictly increasing (index " + std::to_string(i) +
                       ")");
    }
  }
  if (next_value_ && !(*next_value_ > values_.back())) {
    throw OrderError("next_value must exceed the last included eigenvalue");
  }
  check_kind_invariants(kind_, values_);
}

std::vector<std::uint64_t> sieve_primes(std::uint64_t limit) {
  std::vector<std::uint64_t> primes;
  if (limit < 2) return primes;
  std::vector<bool> composite(limit + 1, false);
  for (std::uint64_t p = 2; p <= limit; ++p) {
    if (composite[p]) continue;
    primes.push_back(p);
    for (std::uint64_t q = p * p; q <= limit; q += p) composite[q] = true;
  }
  return primes;
}

std::uint64_t prime_count(std::uint64_t x) { return sieve_primes(x).size(); }

Spectrum primes_upto_n(std::size_t n) {
  if (n == 0) throw ValidationError("primes_upto_n needs n >= 1");
  // p_k < k (ln k + ln ln k) for k >= 6.
  const double k = static_cast<double>(n + 1);
  std::uint64_t limit = 16;
  if (k >= 6) limit = static_cast<std::uint64_t>(k * (std::log(k) + std::log(std::log(k)))) + 16;
  auto primes = sieve_primes(limit);
  std::vector<double> values(primes.begin(), primes.begin() + static_cast<std::ptrdiff_t>(n));
  return Spectrum(SpectrumKind::Primes, std::move(values), static_cast<double>(primes[n]));
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<double> parse_table(std::istream& in) {
  std::vector<double> values;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto token = trim(line);
    if (token.empty()) throw ParseError(line_no, "blank line in zero table");
    double value = 0.0;
    const auto* end = token.data() + token.size();
    const auto [ptr, ec] = std::from_chars(token.data(), end, value);
    if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
      throw ParseError(line_no, "not a decimal number: '" + std::string(token) + "'");
    }
    if (!values.empty() && !(value > values.back())) {
      throw OrderError("zero table is not strictly ascending at line " + std::to_string(line_no));
    }
    values.push_back(value);
  }
  return values;
}

}  // namespace

Spectrum parse_zeta_zeros(std::istream& in, std::size_t n) {
  if (n == 0) throw ValidationError("zero count must be >= 1");
  auto table = parse_table(in);
  if (table.size() < n + 1) {
    throw InsufficientData("zero table holds " + std::to_string(table.size()) +
                           " entries; need " + std::to_string(n + 1));
  }
  const double next = table[n];
  table.resize(n);
  return Spectrum(SpectrumKind::ZetaZeros, std::move(table), next);
}

Spectrum load_zeta_zeros(const std::filesystem::path& path, std::size_t n) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open zero table " + path.string());
  return parse_zeta_zeros(in, n);
}

std::vector<double> read_zero_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open zero table " + path.string());
  return parse_table(in);
}

double airy_ai_prime_zero(std::size_t k) {
  if (k == 0) throw ValidationError("Airy zero index is 1-based");
  // a'_k lies strictly between the Ai zeros a_k and a_{k-1} (a_0 := 0).
  const double lo = boost::math::airy_ai_zero<double>(static_cast<int>(k));
  const double hi = k == 1 ? 0.0 : boost::math::airy_ai_zero<double>(static_cast<int>(k - 1));
  auto f = [](double x) { return boost::math::airy_ai_prime(x); };
  boost::math::tools::eps_tolerance<double> tol(std::numeric_limits<double>::digits - 2);
  const auto [a, b] = boost::math::tools::bisect(f, lo, hi, tol);
  return 0.5 * (a + b);
}

Spectrum reference_spectrum(SpectrumKind kind, std::size_t n) {
  if (n == 0) throw ValidationError("reference spectrum needs n >= 1");
  std::vector<double> values;
  values.reserve(n);
  std::optional<double> next;
  auto level = [kind](std::size_t i) -> double {
    if (kind == SpectrumKind::Harmonic) return static_cast<double>(2 * i + 1);
    // Even states sit at zeros of Ai', odd states at zeros of Ai.
    const std::size_t k = i / 2 + 1;
    return i % 2 == 0 ? -airy_ai_prime_zero(k) : -boost::math::airy_ai_zero<double>(static_cast<int>(k));
  };
  if (kind != SpectrumKind::Harmonic && kind != SpectrumKind::Triangular) {
    throw ValidationError("reference_spectrum supports harmonic and triangular only");
  }
  for (std::size_t i = 0; i < n; ++i) values.push_back(level(i));
  next = level(n);
  return Spectrum(kind, std::move(values), next);
}

int mobius(std::uint64_t m) {
  if (m == 0) throw DomainError("mobius is defined for m >= 1");
  int sign = 1;
  for (std::uint64_t p = 2; p * p <= m; ++p) {
    if (m % p != 0) continue;
    m /= p;
    if (m % p == 0) return 0;
    sign = -sign;
  }
  return m > 1 ? -sign : sign;
}

CountingTables::CountingTables(std::uint64_t mobius_limit, std::vector<double> zero_table)
    : mobius_(mobius_limit + 1, 1), zeros_(std::move(zero_table)) {
  if (mobius_limit < 1) throw ValidationError("mobius table needs limit >= 1");
  mobius_[0] = 0;
  std::vector<bool> composite(mobius_limit + 1, false);
  for (std::uint64_t p = 2; p <= mobius_limit; ++p) {
    if (composite[p]) continue;
    for (std::uint64_t q = p; q <= mobius_limit; q += p) {
      if (q > p) composite[q] = true;
      mobius_[q] = static_cast<std::int8_t>(-mobius_[q]);
    }
    if (p <= mobius_limit / p) {
      for (std::uint64_t q = p * p; q <= mobius_limit; q += p * p) mobius_[q] = 0;
    }
  }
  if (!std::is_sorted(zeros_.begin(), zeros_.end())) {
    throw OrderError("zero table must be ascending");
  }
}

int CountingTables::mobius(std::uint64_t m) const {
  if (m == 0) throw DomainError("mobius is defined for m >= 1");
  if (m >= mobius_.size()) return spectra::mobius(m);
  return mobius_[m];
}

std::size_t CountingTables::zeros_below(double e) const {
  return static_cast<std::size_t>(std::lower_bound(zeros_.begin(), zeros_.end(), e) - zeros_.begin());
}

double logarithmic_integral(double x) {
  if (!(x > 0.0)) throw DomainError("li(x) needs x > 0");
  if (x == 1.0) return -std::numeric_limits<double>::infinity();
  return boost::math::expint(std::log(x));
}

double riemann_r(double x) {
  if (!(x > 1.0)) throw DomainError("riemann_r needs x > 1");
  const auto m_max = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::floor(std::log2(x))));
  double sum = 0.0;
  for (std::uint64_t m = 1; m <= m_max; ++m) {
    const int mu = mobius(m);
    if (mu == 0) continue;
    const double md = static_cast<double>(m);
    sum += mu * logarithmic_integral(std::pow(x, 1.0 / md)) / md;
  }
  return sum;
}

double zeta_counting_function(double e) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  if (!(e > two_pi)) throw DomainError("zeta_counting_function needs E > 2 pi");
  return e * std::log(e) / two_pi - (1.0 + std::log(two_pi)) / two_pi * e + 7.0 / 8.0;
}

void write_spectrum_csv(std::ostream& out, const Spectrum& s) {
  out << "index,eigenvalue\n";
  std::ostringstream line;
  line << std::setprecision(17);
  for (std::size_t i = 0; i < s.size(); ++i) {
    line.str({});
    line << (i + 1) << ',' << s[i] << '\n';
    out << line.str();
  }
}

}  // namespace spectral_forge::spectra
