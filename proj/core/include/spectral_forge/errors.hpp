#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace spectral_forge {

// Two families: bad inputs (ValidationError) and numerical breakdowns
// (NumericalError). The CLI maps them to exit codes 2 and 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

// ---- spectra ---------------------------------------------------------------

class ParseError : public ValidationError {
 public:
  ParseError(std::size_t line, const std::string& what);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class OrderError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class InsufficientData : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class DomainError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// ---- marchenko / dressing --------------------------------------------------

class AsymptoteError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class DegenerateError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class PrecisionError : public NumericalError {
 public:
  PrecisionError(double x, const std::string& what);
  double x() const noexcept { return x_; }

 private:
  double x_;
};

class ConvergenceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class GridError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NodeError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Raised by dress_spectrum with the recursion level that failed.
class DressingLevelError : public NumericalError {
 public:
  DressingLevelError(std::size_t level, const std::string& what);
  std::size_t level() const noexcept { return level_; }

 private:
  std::size_t level_;
};

// ---- schrodinger -----------------------------------------------------------

class InsufficientStates : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class GridTooCoarse : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class LengthMismatch : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// ---- fractal ---------------------------------------------------------------

class CoverageError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class DegenerateSignal : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace spectral_forge
