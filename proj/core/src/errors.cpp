#include "spectral_forge/errors.hpp"

namespace spectral_forge {

ParseError::ParseError(std::size_t line, const std::string& what)
    : ValidationError("line " + std::to_string(line) + ": " + what), line_(line) {}

PrecisionError::PrecisionError(double x, const std::string& what)
    : NumericalError("at x = " + std::to_string(x) + ": " + what), x_(x) {}

DressingLevelError::DressingLevelError(std::size_t level, const std::string& what)
    : NumericalError("dressing level " + std::to_string(level) + ": " + what), level_(level) {}

}  // namespace spectral_forge
