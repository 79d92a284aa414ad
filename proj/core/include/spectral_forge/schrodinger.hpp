#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "spectral_forge/potential.hpp"
#include "spectral_forge/spectra.hpp"

// Forward bound-state solver for -psi'' + V psi = E psi on a sampled potential.
namespace spectral_forge::schrodinger {

struct EigenEntry {
  std::size_t n = 0;        // 1-based level index
  double target = 0.0;      // NaN when no target is attached
  double recovered = 0.0;
  double abs_error = 0.0;   // |recovered - target|
  double rel_error = 0.0;   // abs_error / |target|
  double estimate = 0.0;    // Richardson error estimate of `recovered`
};

struct SolverMeta {
  double dx = 0.0;
  int extrapolation_order = 4;  // Numerov error order removed by Richardson
  double tolerance = 0.0;
  double padding = 0.0;         // length added on each side at v_infinity
};

struct ParitySummary {
  double even_mean_abs_error = 0.0;
  double odd_mean_abs_error = 0.0;
  std::size_t even_count = 0;
  std::size_t odd_count = 0;
  double max_abs_error = 0.0;
  double max_rel_error = 0.0;
  double mean_rel_error = 0.0;
};

struct EigenReport {
  std::vector<EigenEntry> entries;
  SolverMeta meta;

  std::vector<double> recovered() const;
  // Mean |error| over even and odd n (n 1-based), plus overall maxima.
  // With skip_first, level 1 is left out of every statistic.
  ParitySummary parity_summary(bool skip_first = false) const;
};

struct SolveOptions {
  double tolerance = 1e-8;
  unsigned threads = 1;  // 0 = hardware concurrency
};

// Lowest n_levels eigenvalues. The sampled interval must be symmetric about 0;
// outside it V is continued by p.v_infinity. Each level is bracketed by
// Numerov node counting (Dirichlet ends on the padded interval) and bisected
// to the tolerance on grids dx and 2 dx, then Richardson-extrapolated.
// Throws InsufficientStates, GridTooCoarse.
EigenReport solve_eigenvalues(const SampledPotential& p, std::size_t n_levels,
                              const SolveOptions& options = {});

// Number of Numerov nodes (= discrete eigenvalues below e) on the sampled
// grid with the given padding, stride 1 or 2.
std::size_t node_count(const SampledPotential& p, double e, double padding, unsigned stride = 1);

// Per-level errors of recovered against target. Throws LengthMismatch.
EigenReport compare_spectra(const spectra::Spectrum& target, std::span<const double> recovered);
EigenReport compare_spectra(const spectra::Spectrum& target, const EigenReport& solved);

// CSV n,target,recovered,abs_err,rel_err (plus '#' metadata).
void write_report_csv(std::ostream& out, const EigenReport& report,
                      const std::map<std::string, std::string>& extra_metadata = {});
// Summary JSON with solver settings and parity statistics.
std::string report_summary_json(const EigenReport& report,
                                const std::map<std::string, std::string>& extra_metadata = {});

}  // namespace spectral_forge::schrodinger
