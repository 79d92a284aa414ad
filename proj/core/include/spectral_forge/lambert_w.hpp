#pragma once

namespace spectral_forge {

// Principal branch W0(z) for z >= -1/e, by Halley iteration to relative 1e-15.
double lambert_w0(double z);

}  // namespace spectral_forge
