#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "spectral_forge/potential.hpp"
#include "spectral_forge/semiclassical.hpp"

// Generalized (Renyi) dimensions of de-trended potential signals by box counting.
namespace spectral_forge::fractal {

struct DetrendedSignal {
  std::vector<double> x;
  std::vector<double> xi;  // V(x) - V_sc(x)

  std::size_t size() const noexcept { return x.size(); }
};

// xi_i = V(x_i) - V_sc(x_i) at the grid points of `inv` inside [x_lo, x_hi].
// With polish = false the profile is read by interpolation only, which is
// much faster on long signals. Throws CoverageError when either the grid or
// the profile table does not reach [x_lo, x_hi].
DetrendedSignal detrend(const SampledPotential& inv, const semiclassical::WKBProfile& sc,
                        double x_lo = 0.0, double x_hi = 10.0, bool polish = true);

enum class Variant { TwoDimensional, Marginal };
std::string_view to_string(Variant v);
Variant variant_from_string(std::string_view name);

// -10, -9.5, ..., 10.
std::vector<double> default_alphas();

// Box occupation counts at side eps (in units of the [0,1]-rescaled signal).
// The box grid is shifted by offset * eps along each axis (offset in [0,1)).
// Counts are returned in box order, empty boxes omitted.
std::vector<std::size_t> box_counts(const DetrendedSignal& sig, double eps, Variant variant,
                                    double offset_x = 0.0, double offset_y = 0.0);

// eps_k = 2^-k, k = 0, 1, ... while the occupied boxes hold at least
// `min_per_box` samples on average.
std::vector<double> eps_ladder(const DetrendedSignal& sig, Variant variant,
                               double min_per_box = 4.0);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

// Slope of ln N(eps) against ln(1/eps) over the given levels.
LineFit box_count_dimension(const DetrendedSignal& sig, const std::vector<double>& eps,
                            Variant variant);

struct RenyiOptions {
  std::vector<double> alphas = default_alphas();
  std::vector<double> eps;           // empty: eps_ladder, then drop both ends
  Variant variant = Variant::TwoDimensional;
  std::size_t bootstrap = 16;        // random box-grid offsets for the noise estimate
  std::uint64_t seed = 20240607;
  double min_r2 = 0.98;              // below this a fit is flagged, not rejected
  double reliable_alpha = -5.0;      // alphas below are reported as unreliable
  unsigned threads = 1;              // 0 = hardware concurrency
};

struct AlphaEstimate {
  double alpha = 0.0;
  double d = 0.0;
  double r2 = 0.0;
  double spread = 0.0;  // bootstrap standard deviation
  bool poor_fit = false;
  bool reliable = true;
};

struct RenyiSpectrum {
  Variant variant = Variant::TwoDimensional;
  std::vector<double> eps;  // levels used in the regression
  std::vector<AlphaEstimate> estimates;
  double noise = 0.0;       // eta: largest bootstrap spread over reliable alphas
  std::size_t samples = 0;
  std::size_t singleton_boxes = 0;  // at the smallest eps
};

// Throws DegenerateSignal for constant xi, InsufficientData for fewer than
// 10^4 samples or a ladder shorter than 4 levels / 2 decades.
RenyiSpectrum renyi_dimension(const DetrendedSignal& sig, const RenyiOptions& options = {});

struct RenyiSummary {
  double d0 = 0.0, d1 = 0.0, d2 = 0.0;  // NaN when the alpha is not on the grid
  double noise = 0.0;
  double spread = 0.0;  // max D - min D over reliable alphas
  bool multifractal = false;            // spread > 3 noise
  std::size_t monotonicity_violations = 0;
  std::size_t poor_fits = 0;
};
RenyiSummary renyi_report(const RenyiSpectrum& spectrum);

// CSV alpha,D_alpha,r2 with '#' metadata, and a summary JSON.
void write_spectrum_csv(std::ostream& out, const RenyiSpectrum& spectrum,
                        const std::map<std::string, std::string>& extra_metadata = {});
std::string spectrum_summary_json(const RenyiSpectrum& spectrum,
                                  const std::map<std::string, std::string>& extra_metadata = {});

// sum_k a^k cos(b^k pi x) on n points of [0, 1], k while b^k < n; graph
// dimension 2 + ln a / ln b.
DetrendedSignal weierstrass_signal(double a, double b, std::size_t n);

struct Calibration {
  double analytic = 0.0;
  double measured = 0.0;  // D_0 of the 2D variant
};
Calibration weierstrass_calibration(double a, double b, std::size_t n, unsigned threads = 1);

}  // namespace spectral_forge::fractal
