#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace spectral_forge {

enum class PotentialMethod { Marchenko, Dressing, WKBPrimes, WKBZeta, Analytic };

std::string_view to_string(PotentialMethod method);
PotentialMethod potential_method_from_string(std::string_view name);

// Potential values on the uniform grid x_i = x0 + i * dx.
struct SampledPotential {
  double x0 = 0.0;
  double dx = 0.0;
  std::vector<double> values;
  PotentialMethod method = PotentialMethod::Analytic;
  std::size_t n_eigenvalues = 0;
  double v_infinity = 0.0;

  std::size_t size() const noexcept { return values.size(); }
  double x(std::size_t i) const noexcept { return x0 + static_cast<double>(i) * dx; }
  double x_end() const noexcept { return x(values.empty() ? 0 : values.size() - 1); }

  // Throws ValidationError when dx <= 0, fewer than two points, or a value is
  // not finite.
  void validate() const;
};

// Symmetric grid on [-x_max, x_max]; x_max must be an integer multiple of dx
// (within rounding) so that x = 0 is a grid point.
std::size_t symmetric_grid_points(double x_max, double dx);

// Largest |V(x_i) - V(-x_i)| over the grid (requires a grid symmetric about 0).
double symmetry_defect(const SampledPotential& p);

// "x,V" CSV with '#' metadata lines (method, n, v_infinity, dx, x0 plus any
// extra entries). Values use 17 significant digits, so a write/read cycle is
// bit-exact.
void write_potential_csv(std::ostream& out, const SampledPotential& p,
                         const std::map<std::string, std::string>& extra_metadata = {});
SampledPotential read_potential_csv(std::istream& in);

}  // namespace spectral_forge
