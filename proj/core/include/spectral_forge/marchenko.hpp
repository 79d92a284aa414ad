#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "spectral_forge/potential.hpp"
#include "spectral_forge/spectra.hpp"

// Closed-form reflectionless inversion:
//
//   V(x) = v_inf - 2 d^2/dx^2 ln det(I + C(x)),
//   C_mn = c_m c_n exp(-(k_m + k_n) x) / (k_m + k_n),
//   c_n^2 / (2 k_n) = prod_{m != n} |(k_m + k_n) / (k_m - k_n)|.
//
// The second derivative is evaluated analytically. With u_n = c_n e^{-k_n x},
// C' = -u u^T, so with s = u^T (I+C)^{-1} u and w = (k.u)^T (I+C)^{-1} u the
// well is V_well = 2 (s^2 - 2 w).
namespace spectral_forge::marchenko {

struct BoundStateSet {
  std::vector<double> kappa;   // decay constants, strictly decreasing
  std::vector<double> log_c2;  // ln c_n^2 (right norming constants)
  double v_infinity = 0.0;
  spectra::Spectrum source;

  std::size_t size() const noexcept { return kappa.size(); }
};

// Default asymptote: midpoint of the last included and the next eigenvalue.
BoundStateSet bind_spectrum(const spectra::Spectrum& s,
                            std::optional<double> v_infinity = std::nullopt);

// ln |i Res_{k = i k_n} T(k)| = ln(2 k_n) + sum_{m != n} ln |(k_m + k_n)/(k_m - k_n)|.
// For the symmetric choice this equals log_c2[n].
std::vector<double> log_transmission_residues(const std::vector<double>& kappa);

struct PrecisionOptions {
  // Lowest working precision in bits (53 = IEEE double).
  unsigned initial_bits = 53;
  unsigned max_bits = 8192;
  // Accepted error estimate, relative to the well depth max(1, k_max^2).
  double tolerance = 1e-12;

  // Reads SPECTRAL_FORGE_PRECISION_BITS (if set) into initial_bits.
  static PrecisionOptions from_environment();
};

struct Evaluation {
  double value = 0.0;          // v_inf + V_well
  double well = 0.0;           // V_well
  unsigned bits = 0;           // working precision that was accepted
  double error_estimate = 0.0; // absolute, same units as value
  double condition_estimate = 0.0;
};

// Evaluates V(x) for one bound-state set. Prepared high-precision constants
// are cached per precision, so reuse one Evaluator for many points.
// Thread-safe; evaluations are pure functions of x.
class Evaluator {
 public:
  explicit Evaluator(BoundStateSet b, PrecisionOptions options = PrecisionOptions::from_environment());
  ~Evaluator();
  Evaluator(const Evaluator&) = delete;
  Evaluator& operator=(const Evaluator&) = delete;

  const BoundStateSet& bound_states() const noexcept { return b_; }
  const PrecisionOptions& options() const noexcept { return options_; }

  Evaluation evaluate(double x) const;
  double potential_at(double x) const { return evaluate(x).value; }

  // ln det(I + C(x)) at the given precision (finite-difference oracle).
  double log_det(double x, unsigned bits) const;

 private:
  struct Prepared;
  const Prepared& prepared(unsigned bits) const;
  unsigned a_priori_bits(double y) const;

  BoundStateSet b_;
  PrecisionOptions options_;
  std::vector<double> log_c2_left_;
  mutable std::mutex mutex_;
  mutable std::map<unsigned, std::unique_ptr<Prepared>> cache_;
};

double potential_at(const BoundStateSet& b, double x,
                    const PrecisionOptions& options = PrecisionOptions::from_environment());

struct SampleOptions {
  PrecisionOptions precision = PrecisionOptions::from_environment();
  unsigned threads = 1;  // 0 = hardware concurrency
};

// Symmetric grid on [-x_max, x_max] with spacing dx.
SampledPotential sample_potential(const BoundStateSet& b, double x_max, double dx,
                                  const SampleOptions& options = {});
SampledPotential sample_potential(const Evaluator& evaluator, double x_max, double dx,
                                  unsigned threads = 1);

// Partial sum 2 sum_{r=1}^{r_max} (-1)^r / r Tr(d^2/dx^2 C^r) of the trace
// series for the well. Throws ConvergenceError when the spectral radius of
// C(x) is >= 1.
double potential_power_series(const BoundStateSet& b, double x, std::size_t r_max);

// Largest eigenvalue of the symmetric positive semidefinite C(x).
double spectral_radius(const BoundStateSet& b, double x);

}  // namespace spectral_forge::marchenko
