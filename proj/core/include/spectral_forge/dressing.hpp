#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "spectral_forge/potential.hpp"
#include "spectral_forge/spectra.hpp"

// Reflectionless potentials built one bound state at a time.
//
// Each step is a Darboux transformation seeded with the even solution phi of
// the current well at energy -k^2, with k larger than every decay constant
// already present. Its log-derivative y = phi'/phi obeys the Riccati equation
//
//   y' = V + k^2 - y^2,   y(0) = 0,
//
// and the dressed well is V - 2 y' = 2 y^2 - V - 2 k^2. The seed has no node
// below the ground state, so levels go in shallowest first; the result is the
// symmetric reflectionless well for the accumulated decay constants. All work
// is on the half line x >= 0 and the evenness of V is used at the origin.
namespace spectral_forge::dressing {

struct DressingState {
  std::size_t level = 0;         // bound states incorporated so far
  std::vector<double> kappa;     // incorporated decay constants, ascending
  SampledPotential potential;    // well on x_i = i dx, i = 0..M (frame with V -> 0)
  std::vector<double> aux;       // y = phi'/phi of the last step, same grid
};

// V = 0 on [0, x_max] with spacing dx (x_max a multiple of dx).
DressingState initial_state(double x_max, double dx);

struct StepOptions {
  double max_kappa_dx = 0.5;      // GridError above this
  double max_relative_jump = 0.5; // GridError when |dy| > this * (|y| + k) in one step
};

// Adds one bound state at -kappa_next^2. Throws DegenerateError if kappa_next
// is already present, OrderError if it is not larger than every incorporated
// decay constant, GridError/NodeError on integration failure.
DressingState dress_step(DressingState state, double kappa_next, const StepOptions& options = {});

struct DressingOptions {
  StepOptions step;
  // Continue from a checkpointed state; its decay constants must be the
  // smallest entries of the target set.
  std::optional<DressingState> resume;
  std::optional<std::filesystem::path> checkpoint_path;
  std::size_t checkpoint_every = 0;  // 0: never
  // Integrate on dx / refine and keep every refine-th point. Checkpoints
  // hold the fine grid.
  std::size_t refine = 1;
  std::function<void(const DressingState&)> on_level;
};

// Decay constants of s for the given (or default midpoint) asymptote.
std::vector<double> decay_constants(const spectra::Spectrum& s, std::optional<double> v_infinity);

// Full recursion, incorporating the levels shallowest first;
// returns the potential shifted by v_infinity on the symmetric grid
// [-x_max, x_max]. Step failures are rethrown as DressingLevelError.
SampledPotential dress_spectrum(const spectra::Spectrum& s, std::optional<double> v_infinity,
                                double x_max, double dx, const DressingOptions& options = {});

// Half-line state and its mirror image on [-x_max, x_max], shifted by v_infinity.
SampledPotential to_symmetric(const DressingState& state, double v_infinity, std::size_t n_eigenvalues);

// Text checkpoint: '#' metadata (level, dx, kappa list) and columns x,V,aux.
void write_checkpoint(std::ostream& out, const DressingState& state);
DressingState read_checkpoint(std::istream& in);

}  // namespace spectral_forge::dressing
