#pragma once

// Minimal RAII over the MPFR C API. Every value carries its own precision, so
// evaluations at different precisions can run concurrently.

#include <mpfr.h>

#include <cstddef>
#include <memory>

namespace spectral_forge::mp {

class Real {
 public:
  explicit Real(mpfr_prec_t bits) { mpfr_init2(v_, bits); }
  Real(mpfr_prec_t bits, double value) {
    mpfr_init2(v_, bits);
    mpfr_set_d(v_, value, MPFR_RNDN);
  }
  ~Real() { mpfr_clear(v_); }
  Real(const Real&) = delete;
  Real& operator=(const Real&) = delete;

  mpfr_ptr get() noexcept { return v_; }
  mpfr_srcptr get() const noexcept { return v_; }
  operator mpfr_ptr() noexcept { return v_; }
  operator mpfr_srcptr() const noexcept { return v_; }
  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }

 private:
  mpfr_t v_;
};

// Fixed-size array of MPFR values sharing one precision.
class Array {
 public:
  Array() = default;
  Array(std::size_t n, mpfr_prec_t bits) : n_(n), data_(new __mpfr_struct[n]) {
    for (std::size_t i = 0; i < n; ++i) mpfr_init2(&data_[i], bits);
  }
  ~Array() {
    for (std::size_t i = 0; i < n_; ++i) mpfr_clear(&data_[i]);
  }
  Array(Array&& o) noexcept : n_(o.n_), data_(std::move(o.data_)) { o.n_ = 0; }
  Array& operator=(Array&& o) noexcept {
    if (this != &o) {
      for (std::size_t i = 0; i < n_; ++i) mpfr_clear(&data_[i]);
      n_ = o.n_;
      data_ = std::move(o.data_);
      o.n_ = 0;
    }
    return *this;
  }

  std::size_t size() const noexcept { return n_; }
  mpfr_ptr operator[](std::size_t i) noexcept { return &data_[i]; }
  mpfr_srcptr operator[](std::size_t i) const noexcept { return &data_[i]; }

 private:
  std::size_t n_ = 0;
  std::unique_ptr<__mpfr_struct[]> data_;
};

}  // namespace spectral_forge::mp
