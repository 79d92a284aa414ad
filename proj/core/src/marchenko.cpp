#include "spectral_forge/marchenko.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <string>
#include <thread>

#include "mp.hpp"
#include "spectral_forge/errors.hpp"

namespace spectral_forge::marchenko {

BoundStateSet bind_spectrum(const spectra::Spectrum& s, std::optional<double> v_infinity) {
  double v_inf = 0.0;
  if (v_infinity) {
    v_inf = *v_infinity;
    if (!std::isfinite(v_inf) || !(v_inf > s.back())) {
      throw AsymptoteError("v_infinity must exceed the largest eigenvalue");
    }
  } else {
    if (!s.next_value()) {
      throw AsymptoteError("no v_infinity given and the spectrum has no next eigenvalue");
    }
    v_inf = 0.5 * (s.back() + *s.next_value());
  }

  BoundStateSet b{.kappa = {}, .log_c2 = {}, .v_infinity = v_inf, .source = s};
  b.kappa.reserve(s.size());
  for (double e : s.values()) b.kappa.push_back(std::sqrt(v_inf - e));
  for (std::size_t n = 1; n < b.kappa.size(); ++n) {
    if (!(b.kappa[n] < b.kappa[n - 1])) {
      throw DegenerateError("decay constants " + std::to_string(n - 1) + " and " +
                            std::to_string(n) + " coincide");
    }
  }
  b.log_c2 = log_transmission_residues(b.kappa);
  for (double l : b.log_c2) {
    if (!std::isfinite(l)) throw DegenerateError("norming constant is not finite");
  }
  return b;
}

std::vector<double> log_transmission_residues(const std::vector<double>& kappa) {
  const std::size_t n = kappa.size();
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = std::log(2.0 * kappa[i]);
    for (std::size_t m = 0; m < n; ++m) {
      if (m == i) continue;
      const double diff = std::abs(kappa[m] - kappa[i]);
      if (diff == 0.0) throw DegenerateError("repeated decay constant");
      // (k_m + k_n) / |k_m - k_n| = 1 + 2 min / |diff|
      acc += std::log1p(2.0 * std::min(kappa[m], kappa[i]) / diff);
    }
    out[i] = acc;
  }
  return out;
}

PrecisionOptions PrecisionOptions::from_environment() {
  PrecisionOptions o;
  if (const char* env = std::getenv("SPECTRAL_FORGE_PRECISION_BITS"); env && *env) {
    char* end = nullptr;
    const unsigned long bits = std::strtoul(env, &end, 10);
    if (end == env || *end != '\0' || bits < 53 || bits > 1u << 20) {
      throw ValidationError("SPECTRAL_FORGE_PRECISION_BITS must be an integer >= 53");
    }
    o.initial_bits = static_cast<unsigned>(bits);
    o.max_bits = std::max(o.max_bits, o.initial_bits);
  }
  return o;
}

// ---------------------------------------------------------------------------

struct Evaluator::Prepared {
  mpfr_prec_t bits;
  mp::Array kappa;
  mp::Array half_lc_right;
  mp::Array half_lc_left;
  mp::Array cauchy;  // 1 / (k_m + k_n), row-major

  Prepared(const BoundStateSet& b, const std::vector<double>& lc_left, mpfr_prec_t p)
      : bits(p),
        kappa(b.size(), p),
        half_lc_right(b.size(), p),
        half_lc_left(b.size(), p),
        cauchy(b.size() * b.size(), p) {
    const std::size_t n = b.size();
    mp::Real one(p, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
      mpfr_set_d(kappa[i], b.kappa[i], MPFR_RNDN);
      mpfr_set_d(half_lc_right[i], b.log_c2[i], MPFR_RNDN);
      mpfr_div_2ui(half_lc_right[i], half_lc_right[i], 1, MPFR_RNDN);
      mpfr_set_d(half_lc_left[i], lc_left[i], MPFR_RNDN);
      mpfr_div_2ui(half_lc_left[i], half_lc_left[i], 1, MPFR_RNDN);
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i; j < n; ++j) {
        mpfr_add(cauchy[i * n + j], kappa[i], kappa[j], MPFR_RNDN);
        mpfr_div(cauchy[i * n + j], one, cauchy[i * n + j], MPFR_RNDN);
        mpfr_set(cauchy[j * n + i], cauchy[i * n + j], MPFR_RNDN);
      }
    }
  }
};

namespace {

struct Attempt {
  bool factored = false;
  double s = 0.0;
  double w = 0.0;
  double well = 0.0;  // 2 (s^2 - 2 w), formed before rounding to double
  double condition = 0.0;
  double error = 0.0;  // absolute error estimate of V_well
};

// A = I + C, C_ij = u_i u_j / (k_i + k_j). Cholesky, one solve A z = u and a
// residual check. max_j A_jj / min_j d_j (d_j the pivots) bounds both the
// spread of the pivots and the cancellation inside each diagonal update, and
// serves as the condition estimate.
Attempt solve_double(const std::vector<double>& kappa, const std::vector<double>& lc, double y) {
  const std::size_t n = kappa.size();
  std::vector<double> u(n), ku(n), a(n * n), l(n * n, 0.0), z(n);
  for (std::size_t i = 0; i < n; ++i) {
    u[i] = std::exp(0.5 * lc[i] - kappa[i] * y);
    ku[i] = kappa[i] * u[i];
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      a[i * n + j] = u[i] * u[j] / (kappa[i] + kappa[j]) + (i == j ? 1.0 : 0.0);
    }
  }
  Attempt out;
  double dmax = 0.0, dmin = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < n; ++j) {
    double d = a[j * n + j];
    for (std::size_t k = 0; k < j; ++k) d -= l[j * n + k] * l[j * n + k];
    if (!(d > 0.0) || !std::isfinite(d)) return out;
    const double ljj = std::sqrt(d);
    l[j * n + j] = ljj;
    dmax = std::max(dmax, a[j * n + j]);
    dmin = std::min(dmin, d);
    for (std::size_t i = j + 1; i < n; ++i) {
      double v = a[i * n + j];
      for (std::size_t k = 0; k < j; ++k) v -= l[i * n + k] * l[j * n + k];
      l[i * n + j] = v / ljj;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    double v = u[i];
    for (std::size_t k = 0; k < i; ++k) v -= l[i * n + k] * z[k];
    z[i] = v / l[i * n + i];
  }
  for (std::size_t i = n; i-- > 0;) {
    double v = z[i];
    for (std::size_t k = i + 1; k < n; ++k) v -= l[k * n + i] * z[k];
    z[i] = v / l[i * n + i];
  }
  // Componentwise backward error max_i |r_i| / (|A| |z| + |u|)_i.
  double backward = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double r = -u[i], scale = std::abs(u[i]);
    for (std::size_t j = 0; j < n; ++j) {
      r += a[i * n + j] * z[j];
      scale += std::abs(a[i * n + j] * z[j]);
    }
    backward = std::max(backward, std::abs(r) / scale);
  }
  for (std::size_t i = 0; i < n; ++i) {
    out.s += u[i] * z[i];
    out.w += ku[i] * z[i];
  }
  const double eps = std::numeric_limits<double>::epsilon();
  out.factored = true;
  out.well = 2.0 * (out.s * out.s - 2.0 * out.w);
  out.condition = dmax / dmin;
  const double rel = out.condition * std::max(backward, static_cast<double>(n) * eps);
  out.error = (rel + eps) * (4.0 * out.s * out.s + 4.0 * std::abs(out.w));
  return out;
}

Attempt solve_mp(const mp::Array& kappa, const mp::Array& cauchy, const mp::Array& half_lc,
                 double y, mpfr_prec_t p) {
  const std::size_t n = kappa.size();
  mp::Array u(n, p), ku(n, p), l(n * n, p), z(n, p);
  mp::Real t(p), acc(p), yy(p, y);
  for (std::size_t i = 0; i < n; ++i) {
    mpfr_mul(t, kappa[i], yy, MPFR_RNDN);
    mpfr_sub(t, half_lc[i], t, MPFR_RNDN);
    mpfr_exp(u[i], t, MPFR_RNDN);
    mpfr_mul(ku[i], kappa[i], u[i], MPFR_RNDN);
  }
  // Lower triangle of A into l.
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      mpfr_mul(t, u[i], u[j], MPFR_RNDN);
      mpfr_mul(l[i * n + j], t, cauchy[i * n + j], MPFR_RNDN);
    }
    mpfr_add_ui(l[i * n + i], l[i * n + i], 1, MPFR_RNDN);
  }
  Attempt out;
  mp::Real dmax(p, 0.0), dmin(p), d(p);
  mpfr_set_inf(dmin, 1);
  for (std::size_t j = 0; j < n; ++j) {
    mpfr_set_zero(acc, 1);
    for (std::size_t k = 0; k < j; ++k) {
      mpfr_sqr(t, l[j * n + k], MPFR_RNDN);
      mpfr_add(acc, acc, t, MPFR_RNDN);
    }
    mpfr_max(dmax, dmax, l[j * n + j], MPFR_RNDN);
    mpfr_sub(d, l[j * n + j], acc, MPFR_RNDN);
    if (mpfr_sgn(d.get()) <= 0 || !mpfr_number_p(d.get())) return out;
    mpfr_min(dmin, dmin, d, MPFR_RNDN);
    mpfr_sqrt(l[j * n + j], d, MPFR_RNDN);
    mpfr_srcptr ljj = l[j * n + j];
    for (std::size_t i = j + 1; i < n; ++i) {
      mpfr_set_zero(acc, 1);
      mpfr_ptr li = l[i * n];
      mpfr_ptr lj = l[j * n];
      for (std::size_t k = 0; k < j; ++k) {
        mpfr_mul(t, li + k, lj + k, MPFR_RNDN);
        mpfr_add(acc, acc, t, MPFR_RNDN);
      }
      mpfr_sub(li + j, li + j, acc, MPFR_RNDN);
      mpfr_div(li + j, li + j, ljj, MPFR_RNDN);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    mpfr_set(acc, u[i], MPFR_RNDN);
    for (std::size_t k = 0; k < i; ++k) {
      mpfr_mul(t, l[i * n + k], z[k], MPFR_RNDN);
      mpfr_sub(acc, acc, t, MPFR_RNDN);
    }
    mpfr_div(z[i], acc, l[i * n + i], MPFR_RNDN);
  }
  for (std::size_t i = n; i-- > 0;) {
    mpfr_set(acc, z[i], MPFR_RNDN);
    for (std::size_t k = i + 1; k < n; ++k) {
      mpfr_mul(t, l[k * n + i], z[k], MPFR_RNDN);
      mpfr_sub(acc, acc, t, MPFR_RNDN);
    }
    mpfr_div(z[i], acc, l[i * n + i], MPFR_RNDN);
  }
  // Componentwise backward error against the original matrix, rebuilt from u
  // and the Cauchy factors.
  double backward = 0.0;
  mp::Real a(p), scale(p);
  for (std::size_t i = 0; i < n; ++i) {
    mpfr_neg(acc, u[i], MPFR_RNDN);
    mpfr_abs(scale, u[i], MPFR_RNDN);
    for (std::size_t j = 0; j < n; ++j) {
      mpfr_mul(a, u[i], u[j], MPFR_RNDN);
      mpfr_mul(a, a, cauchy[i * n + j], MPFR_RNDN);
      if (i == j) mpfr_add_ui(a, a, 1, MPFR_RNDN);
      mpfr_mul(t, a, z[j], MPFR_RNDN);
      mpfr_add(acc, acc, t, MPFR_RNDN);
      mpfr_abs(t, t, MPFR_RNDN);
      mpfr_add(scale, scale, t, MPFR_RNDN);
    }
    mpfr_abs(acc, acc, MPFR_RNDN);
    mpfr_div(acc, acc, scale, MPFR_RNDN);
    backward = std::max(backward, acc.to_double());
  }
  mp::Real s(p, 0.0), w(p, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    mpfr_mul(t, u[i], z[i], MPFR_RNDN);
    mpfr_add(s, s, t, MPFR_RNDN);
    mpfr_mul(t, ku[i], z[i], MPFR_RNDN);
    mpfr_add(w, w, t, MPFR_RNDN);
  }
  out.factored = true;
  out.s = s.to_double();
  out.w = w.to_double();
  mpfr_sqr(t, s, MPFR_RNDN);
  mpfr_mul_2ui(acc, w, 1, MPFR_RNDN);
  mpfr_sub(t, t, acc, MPFR_RNDN);
  mpfr_mul_2ui(t, t, 1, MPFR_RNDN);
  out.well = t.to_double();
  mpfr_div(d, dmax, dmin, MPFR_RNDN);
  out.condition = d.to_double();
  const double eps = std::ldexp(1.0, 1 - static_cast<int>(p));
  const double rel = out.condition * std::max(backward, static_cast<double>(n) * eps);
  out.error = rel * (4.0 * out.s * out.s + 4.0 * std::abs(out.w));
  return out;
}

unsigned round_up(double bits) {
  const double r = std::ceil(std::max(bits, 64.0) / 64.0) * 64.0;
  return r > 1e9 ? std::numeric_limits<unsigned>::max() : static_cast<unsigned>(r);
}

}  // namespace

Evaluator::Evaluator(BoundStateSet b, PrecisionOptions options)
    : b_(std::move(b)), options_(options) {
  if (b_.kappa.empty() || b_.kappa.size() != b_.log_c2.size()) {
    throw ValidationError("bound-state set needs matching, nonempty kappa and log_c2");
  }
  for (std::size_t i = 0; i < b_.size(); ++i) {
    if (!(b_.kappa[i] > 0.0) || !std::isfinite(b_.kappa[i]) || !std::isfinite(b_.log_c2[i])) {
      throw ValidationError("bound-state set holds a non-positive or non-finite entry");
    }
  }
  // Left constants from |Res T_n|^2 = c_n^2(right) c_n^2(left).
  const auto lres = log_transmission_residues(b_.kappa);
  log_c2_left_.resize(b_.size());
  for (std::size_t i = 0; i < b_.size(); ++i) log_c2_left_[i] = 2.0 * lres[i] - b_.log_c2[i];
}

Evaluator::~Evaluator() = default;

const Evaluator::Prepared& Evaluator::prepared(unsigned bits) const {
  std::lock_guard lock(mutex_);
  auto& slot = cache_[bits];
  if (!slot) slot = std::make_unique<Prepared>(b_, log_c2_left_, static_cast<mpfr_prec_t>(bits));
  return *slot;
}

unsigned Evaluator::a_priori_bits(double y) const {
  // log2 of the largest diagonal entry of C bounds the dynamic range the
  // factorization has to carry.
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < b_.size(); ++i) {
    const double lc = std::max(b_.log_c2[i], log_c2_left_[i]);
    m = std::max(m, lc - 2.0 * b_.kappa[i] * y - std::log(2.0 * b_.kappa[i]));
  }
  m /= std::log(2.0);
  if (m <= 4.0 && options_.initial_bits <= 53) return 53;
  return std::max(options_.initial_bits, round_up(m + 96.0));
}

Evaluation Evaluator::evaluate(double x) const {
  if (!std::isfinite(x)) throw ValidationError("potential_at needs a finite x");
  const double y = std::abs(x);
  const bool left = x < 0.0;
  const auto& lc = left ? log_c2_left_ : b_.log_c2;
  const double kmax = *std::max_element(b_.kappa.begin(), b_.kappa.end());
  const double budget = options_.tolerance * std::max(1.0, kmax * kmax);

  unsigned bits = a_priori_bits(y);
  while (true) {
    if (bits > options_.max_bits) {
      throw PrecisionError(x, "potential at x = " + std::to_string(x) + " needs more than " +
                                  std::to_string(options_.max_bits) + " bits");
    }
    Attempt a;
    if (bits <= 53) {
      a = solve_double(b_.kappa, lc, y);
    } else {
      const auto& prep = prepared(bits);
      a = solve_mp(prep.kappa, prep.cauchy, left ? prep.half_lc_left : prep.half_lc_right, y,
                   prep.bits);
    }
    if (!a.factored || !std::isfinite(a.error)) {
      bits = bits <= 53 ? 128 : 2 * bits;
      continue;
    }
    if (a.error <= budget) {
      Evaluation e;
      e.well = a.well;
      e.value = b_.v_infinity + e.well;
      e.bits = bits;
      e.error_estimate = a.error;
      e.condition_estimate = a.condition;
      return e;
    }
    const unsigned next = round_up(bits + std::log2(a.error / budget) + 32.0);
    bits = std::max(next, bits + 64);
  }
}

double Evaluator::log_det(double x, unsigned bits) const {
  const double y = std::abs(x);
  const auto& prep = prepared(std::max(bits, 64u));
  const auto& half_lc = x < 0.0 ? prep.half_lc_left : prep.half_lc_right;
  const std::size_t n = b_.size();
  const mpfr_prec_t p = prep.bits;
  mp::Array u(n, p), l(n * n, p);
  mp::Real t(p), acc(p), yy(p, y), sum(p, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    mpfr_mul(t, prep.kappa[i], yy, MPFR_RNDN);
    mpfr_sub(t, half_lc[i], t, MPFR_RNDN);
    mpfr_exp(u[i], t, MPFR_RNDN);
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      mpfr_mul(t, u[i], u[j], MPFR_RNDN);
      mpfr_mul(l[i * n + j], t, prep.cauchy[i * n + j], MPFR_RNDN);
    }
    mpfr_add_ui(l[i * n + i], l[i * n + i], 1, MPFR_RNDN);
  }
  for (std::size_t j = 0; j < n; ++j) {
    mpfr_set(acc, l[j * n + j], MPFR_RNDN);
    for (std::size_t k = 0; k < j; ++k) {
      mpfr_sqr(t, l[j * n + k], MPFR_RNDN);
      mpfr_sub(acc, acc, t, MPFR_RNDN);
    }
    if (mpfr_sgn(acc.get()) <= 0) throw PrecisionError(x, "log-det factorization broke down");
    mpfr_log(t, acc, MPFR_RNDN);
    mpfr_add(sum, sum, t, MPFR_RNDN);
    mpfr_sqrt(l[j * n + j], acc, MPFR_RNDN);
    for (std::size_t i = j + 1; i < n; ++i) {
      mpfr_set(acc, l[i * n + j], MPFR_RNDN);
      for (std::size_t k = 0; k < j; ++k) {
        mpfr_mul(t, l[i * n + k], l[j * n + k], MPFR_RNDN);
        mpfr_sub(acc, acc, t, MPFR_RNDN);
      }
      mpfr_div(l[i * n + j], acc, l[j * n + j], MPFR_RNDN);
    }
  }
  return sum.to_double();
}

double potential_at(const BoundStateSet& b, double x, const PrecisionOptions& options) {
  return Evaluator(b, options).potential_at(x);
}

SampledPotential sample_potential(const BoundStateSet& b, double x_max, double dx,
                                  const SampleOptions& options) {
  const Evaluator ev(b, options.precision);
  return sample_potential(ev, x_max, dx, options.threads);
}

SampledPotential sample_potential(const Evaluator& ev, double x_max, double dx, unsigned threads) {
  const std::size_t count = symmetric_grid_points(x_max, dx);
  const std::size_t half = (count - 1) / 2;
  SampledPotential p;
  p.dx = dx;
  p.x0 = -static_cast<double>(half) * dx;
  p.method = PotentialMethod::Marchenko;
  p.n_eigenvalues = ev.bound_states().size();
  p.v_infinity = ev.bound_states().v_infinity;
  p.values.assign(count, 0.0);

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  // Grid points are x_i = (i - half) dx exactly, so V(x_i) and V(-x_i) see
  // mirrored arguments.
  auto point = [&](std::size_t i) {
    const double xi = (static_cast<double>(i) - static_cast<double>(half)) * dx;
    p.values[i] = ev.potential_at(xi);
  };
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) point(i);
    return p;
  }
  // Interleaved assignment balances the expensive points near the origin.
  std::vector<std::exception_ptr> errors(count);
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      for (std::size_t i = t; i < count; i += threads) {
        try {
          point(i);
        } catch (...) {
          errors[i] = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return p;
}

}  // namespace spectral_forge::marchenko
