#include "spectral_forge/lambert_w.hpp"

#include <cmath>
#include <numbers>

#include "spectral_forge/errors.hpp"

namespace spectral_forge {

double lambert_w0(double z) {
  constexpr double branch = -1.0 / std::numbers::e;
  if (std::isnan(z) || z < branch) throw DomainError("lambert_w0 needs z >= -1/e");
  if (z == 0.0) return 0.0;
  if (std::isinf(z)) return z;
  if (z == branch) return -1.0;

  double w;
  if (z < -0.25) {
    // Expansion about the branch point in p = sqrt(2 (e z + 1)).
    const double p = std::sqrt(2.0 * (std::numbers::e * z + 1.0));
    w = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p;
  } else if (z < std::numbers::e) {
    w = std::log1p(z) * (1.0 - std::log1p(std::log1p(z)) / (2.0 + std::log1p(z)));
  } else {
    const double l1 = std::log(z), l2 = std::log(l1);
    w = l1 - l2 + l2 / l1;
  }
  for (int it = 0; it < 64; ++it) {
    const double ew = std::exp(w);
    const double f = w * ew - z;
    const double wp1 = w + 1.0;
    if (wp1 == 0.0) break;
    const double step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
    w -= step;
    if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(w))) break;
  }
  return w;
}

}  // namespace spectral_forge
