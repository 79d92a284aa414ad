#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "spectral_forge/potential.hpp"

// WKB potentials x(V) whose semiclassical level counting follows the primes
// (Riemann R density) or the smooth zeta-zero count, and their inverses V(x).
namespace spectral_forge::semiclassical {

enum class WKBKind { Primes, Zeta };

std::string_view to_string(WKBKind kind);
WKBKind wkb_kind_from_string(std::string_view name);

// Reference energies. The prime integral diverges logarithmically at E0 = 1
// for any finite Moebius truncation, so the default sits above it.
inline constexpr double kDefaultPrimeE0 = 2.0;
double default_e0(WKBKind kind);

// sum_{m <= m_max} mu(m)/m int_{E0}^{V} E^{(1-m)/m} / (ln E sqrt(V - E)) dE.
// m_max = 0 selects floor(log2 V) (at least 1). Throws DomainError for
// V <= e0 or e0 <= 1.
double prime_wkb_x_of_v(double v, double e0, std::size_t m_max = 0);

// Same integral with a given Gauss-Kronrod relative tolerance (self-convergence checks).
double prime_wkb_x_of_v(double v, double e0, std::size_t m_max, double rel_tol);

enum class Band { Below, Inside, Above };
std::string_view to_string(Band band);

// Position of V - e0 relative to (x^2 ln^2 x, x^2 ln^2(x ln x)). Needs x >= 10.
Band prime_wkb_bounds_check(double x, double v, double e0);

// (1/pi) [ sqrt(V - E0) ln(E0 / 2 pi e^2)
//          + sqrt(V) ln((sqrt V + sqrt(V - E0)) / (sqrt V - sqrt(V - E0))) ].
// e0 within 1e-6 relative of 2 pi is taken as 2 pi.
double zeta_wkb_x_of_v(double v, double e0);

// (pi^2 x^2 / 4) W(sqrt(pi/2) |x| / e)^-2; the x -> 0 limit is pi e^2 / 2.
double zeta_wkb_asymptote(double x);

class WKBProfile {
 public:
  WKBProfile(WKBKind kind, double e0, std::size_t m_max, std::vector<double> v,
             std::vector<double> x);

  WKBKind kind() const noexcept { return kind_; }
  double e0() const noexcept { return e0_; }
  std::size_t m_max() const noexcept { return m_max_; }
  const std::vector<double>& v_table() const noexcept { return v_; }
  const std::vector<double>& x_table() const noexcept { return x_; }
  double v_max() const { return v_.back(); }
  double x_max() const { return x_.back(); }

  // Exact x(V) for this profile's kind, e0 and truncation.
  double x_of_v(double v) const;
  // Even in x. Monotone cubic interpolation of the table, then (with polish)
  // a bracketed root solve of x(V) = |x|. DomainError beyond the table.
  double v_of_x(double x, bool polish = true) const;

 private:
  WKBKind kind_;
  double e0_;
  std::size_t m_max_;
  std::vector<double> v_;
  std::vector<double> x_;
  std::vector<double> slope_;  // dV/dx at the nodes (monotone cubic)
};

// Table of n_table nodes on V in [e0, v_max], graded quadratically toward e0.
// For primes m_max = 0 selects floor(log2 v_max), used for every node.
WKBProfile wkb_profile(WKBKind kind, double e0, double v_max, std::size_t n_table,
                       std::size_t m_max = 0, unsigned threads = 1);

// V(x) on the symmetric grid [-x_max, x_max]; v_infinity is the table's v_max.
SampledPotential sample_profile(const WKBProfile& profile, double x_max, double dx,
                                unsigned threads = 1);

// CSV "V,x" with '#' metadata (kind, e0, m_max).
void write_profile_csv(std::ostream& out, const WKBProfile& profile,
                       const std::map<std::string, std::string>& extra_metadata = {});
WKBProfile read_profile_csv(std::istream& in);

}  // namespace spectral_forge::semiclassical
