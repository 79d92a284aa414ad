#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace spectral_forge::spectra {

enum class SpectrumKind { Primes, ZetaZeros, Harmonic, Triangular, Custom };

std::string_view to_string(SpectrumKind kind);
SpectrumKind spectrum_kind_from_string(std::string_view name);

// Ordered target eigenvalues (units hbar^2/2m = 1). Validated on construction:
// strictly increasing, finite, and consistent with the declared kind.
class Spectrum {
 public:
  Spectrum(SpectrumKind kind, std::vector<double> values,
           std::optional<double> next_value = std::nullopt);

  SpectrumKind kind() const noexcept { return kind_; }
  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  double back() const { return values_.back(); }
  // First eigenvalue after the included set; places the default asymptote.
  std::optional<double> next_value() const noexcept { return next_value_; }

 private:
  SpectrumKind kind_;
  std::vector<double> values_;
  std::optional<double> next_value_;
};

// First n primes, next_value = (n+1)-th prime.
Spectrum primes_upto_n(std::size_t n);

// All primes <= limit (plain Eratosthenes sieve).
std::vector<std::uint64_t> sieve_primes(std::uint64_t limit);
std::uint64_t prime_count(std::uint64_t x);

// Zeta-zero tables: one decimal per line, strictly ascending. Blank lines and
// comments are rejected. Needs at least n + 1 entries (the extra one becomes
// next_value).
Spectrum load_zeta_zeros(const std::filesystem::path& path, std::size_t n);
Spectrum parse_zeta_zeros(std::istream& in, std::size_t n);
// Reads the whole table (used for counting checks).
std::vector<double> read_zero_table(const std::filesystem::path& path);

// Harmonic: 1, 3, 5, ... ; Triangular (V = |x|): negated zeros of Ai' and Ai,
// interleaved and ascending.
Spectrum reference_spectrum(SpectrumKind kind, std::size_t n);

// k-th (1-based) zero of Ai'(x); negative.
double airy_ai_prime_zero(std::size_t k);

int mobius(std::uint64_t m);

// Sieved Moebius values plus an optional zero table, shared read-only.
class CountingTables {
 public:
  explicit CountingTables(std::uint64_t mobius_limit, std::vector<double> zero_table = {});

  int mobius(std::uint64_t m) const;
  std::uint64_t mobius_limit() const noexcept { return mobius_.size() - 1; }
  std::span<const double> zero_table() const noexcept { return zeros_; }
  // Number of tabulated zeros strictly below e.
  std::size_t zeros_below(double e) const;

 private:
  std::vector<std::int8_t> mobius_;
  std::vector<double> zeros_;
};

// Cauchy principal value li(x) = PV int_0^x dt / ln t.
double logarithmic_integral(double x);

// R(x) = sum_{m <= floor(log2 x)} mu(m) li(x^{1/m}) / m.
double riemann_r(double x);

// Smooth zero-counting function (1/2pi) E ln E - ((1 + ln 2pi)/2pi) E + 7/8.
double zeta_counting_function(double e);

// CSV with header "index,eigenvalue" (index is 1-based).
void write_spectrum_csv(std::ostream& out, const Spectrum& s);

}  // namespace spectral_forge::spectra
