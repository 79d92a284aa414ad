#include "spectral_forge/semiclassical.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numbers>
#include <ostream>
#include <thread>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include "spectral_forge/csv.hpp"
#include "spectral_forge/errors.hpp"
#include "spectral_forge/lambert_w.hpp"
#include "spectral_forge/spectra.hpp"

namespace spectral_forge::semiclassical {

std::string_view to_string(WKBKind kind) { return kind == WKBKind::Primes ? "primes" : "zeta"; }

WKBKind wkb_kind_from_string(std::string_view name) {
  if (name == "primes") return WKBKind::Primes;
  if (name == "zeta" || name == "zeta-zeros") return WKBKind::Zeta;
  throw ValidationError("unknown WKB kind '" + std::string(name) + "'");
}

double default_e0(WKBKind kind) {
  return kind == WKBKind::Primes ? kDefaultPrimeE0 : 2.0 * std::numbers::pi;
}

std::string_view to_string(Band band) {
  switch (band) {
    case Band::Below: return "below";
    case Band::Inside: return "inside";
    case Band::Above: return "above";
  }
  return "inside";
}

namespace {

std::size_t default_m_max(double v) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(std::log2(v))));
}

template <class F>
void parallel_for(std::size_t count, unsigned threads, F&& body) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(count);
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      for (std::size_t i = t; i < count; i += threads) {
        try {
          body(i);
        } catch (...) {
          errors[i] = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  for (const auto& err : errors) {
    if (err) std::rethrow_exception(err);
  }
}

}  // namespace

double prime_wkb_x_of_v(double v, double e0, std::size_t m_max) {
  return prime_wkb_x_of_v(v, e0, m_max, 1e-9);
}

double prime_wkb_x_of_v(double v, double e0, std::size_t m_max, double rel_tol) {
  if (!(e0 > 1.0)) throw DomainError("prime WKB integral needs e0 > 1");
  if (!(v >= e0)) throw DomainError("prime WKB integral needs V >= e0");
  if (v == e0) return 0.0;
  if (m_max == 0) m_max = default_m_max(v);

  std::vector<double> weight, power;
  for (std::size_t m = 1; m <= m_max; ++m) {
    const int mu = spectra::mobius(m);
    if (mu == 0) continue;
    weight.push_back(mu / static_cast<double>(m));
    power.push_back(1.0 / static_cast<double>(m) - 1.0);
  }
  // E = V - t^2 removes the 1/sqrt(V - E) endpoint singularity:
  // int_{E0}^{V} g(E) / sqrt(V - E) dE = 2 int_0^{sqrt(V - E0)} g(V - t^2) dt.
  auto integrand = [&](double t) {
    const double e = v - t * t;
    double acc = 0.0;
    for (std::size_t i = 0; i < weight.size(); ++i) acc += weight[i] * std::pow(e, power[i]);
    return 2.0 * acc / std::log(e);
  };
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  const double t_end = std::sqrt(v - e0);
  double total = 0.0;
  if (e0 < 2.0 && v > 2.0) {
    const double t_split = std::sqrt(v - 2.0);
    total += GK::integrate(integrand, 0.0, t_split, 20, rel_tol);
    if (v >= 4.0) {
      // Far from the singular endpoint: integrate in E directly, since V - t^2
      // loses the digits of E when t^2 is close to V.
      auto in_e = [&](double e) {
        double acc = 0.0;
        for (std::size_t i = 0; i < weight.size(); ++i) acc += weight[i] * std::pow(e, power[i]);
        return acc / (std::log(e) * std::sqrt(v - e));
      };
      total += GK::integrate(in_e, e0, 2.0, 20, rel_tol);
    } else {
      total += GK::integrate(integrand, t_split, t_end, 20, rel_tol);
    }
  } else {
    total = GK::integrate(integrand, 0.0, t_end, 20, rel_tol);
  }
  return total;
}

Band prime_wkb_bounds_check(double x, double v, double e0) {
  if (!(x >= 10.0)) throw DomainError("the prime WKB band is asymptotic; needs x >= 10");
  const double lx = std::log(x);
  const double lower = x * x * lx * lx;
  const double lxl = std::log(x * lx);
  const double upper = x * x * lxl * lxl;
  const double d = v - e0;
  if (d <= lower) return Band::Below;
  if (d >= upper) return Band::Above;
  return Band::Inside;
}

double zeta_wkb_x_of_v(double v, double e0) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  if (!(e0 >= two_pi * (1.0 - 1e-6))) throw DomainError("zeta WKB potential needs e0 >= 2 pi");
  if (std::abs(e0 - two_pi) <= 1e-6 * two_pi) e0 = two_pi;
  if (!(v >= e0)) throw DomainError("zeta WKB potential needs V >= e0");
  const double s = std::sqrt(v - e0);
  const double r = std::sqrt(v);
  const double a = s / r;
  // ln((r + s)/(r - s)) = 2 atanh(a); split off 2a so the small-s limit keeps
  // its leading terms without cancellation against ln(E0 / 2 pi e^2) = ln(E0 / 2 pi) - 2.
  double atanh_minus_a;
  if (a < 1e-2) {
    const double a2 = a * a;
    atanh_minus_a = a * a2 * (1.0 / 3.0 + a2 * (1.0 / 5.0 + a2 * (1.0 / 7.0 + a2 / 9.0)));
  } else if (a < 1.0) {
    atanh_minus_a = std::atanh(a) - a;
  } else {
    return std::numeric_limits<double>::infinity();
  }
  return (s * std::log(e0 / two_pi) + 2.0 * r * atanh_minus_a) / std::numbers::pi;
}

double zeta_wkb_asymptote(double x) {
  const double ax = std::abs(x);
  if (ax == 0.0) return std::numbers::pi * std::numbers::e * std::numbers::e / 2.0;
  const double w = lambert_w0(std::sqrt(std::numbers::pi / 2.0) * ax / std::numbers::e);
  return std::numbers::pi * std::numbers::pi * ax * ax / (4.0 * w * w);
}

// ---------------------------------------------------------------------------

WKBProfile::WKBProfile(WKBKind kind, double e0, std::size_t m_max, std::vector<double> v,
                       std::vector<double> x)
    : kind_(kind), e0_(e0), m_max_(m_max), v_(std::move(v)), x_(std::move(x)) {
  if (v_.size() != x_.size() || v_.size() < 2) {
    throw ValidationError("WKB profile needs at least two (V, x) pairs");
  }
  for (std::size_t i = 1; i < v_.size(); ++i) {
    if (!(v_[i] > v_[i - 1]) || !(x_[i] > x_[i - 1])) {
      throw ValidationError("WKB profile table must be strictly increasing in V and x");
    }
  }
  // Fritsch-Butland monotone slopes dV/dx.
  const std::size_t n = v_.size();
  std::vector<double> sec(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) sec[i] = (v_[i + 1] - v_[i]) / (x_[i + 1] - x_[i]);
  slope_.assign(n, 0.0);
  slope_[0] = sec[0];
  slope_[n - 1] = sec[n - 2];
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double h0 = x_[i] - x_[i - 1], h1 = x_[i + 1] - x_[i];
    if (sec[i - 1] * sec[i] <= 0.0) continue;
    const double w1 = 2.0 * h1 + h0, w2 = h1 + 2.0 * h0;
    slope_[i] = (w1 + w2) / (w1 / sec[i - 1] + w2 / sec[i]);
  }
}

double WKBProfile::x_of_v(double v) const {
  return kind_ == WKBKind::Primes ? prime_wkb_x_of_v(v, e0_, m_max_) : zeta_wkb_x_of_v(v, e0_);
}

double WKBProfile::v_of_x(double x, bool polish) const {
  const double ax = std::abs(x);
  if (ax > x_.back()) throw DomainError("x = " + std::to_string(x) + " lies beyond the WKB table");
  if (ax == 0.0) return v_.front();
  auto it = std::upper_bound(x_.begin(), x_.end(), ax);
  std::size_t i = static_cast<std::size_t>(it - x_.begin());
  if (i == x_.size()) i = x_.size() - 1;
  const std::size_t k = i - 1;
  const double h = x_[i] - x_[k];
  const double t = (ax - x_[k]) / h;
  const double t2 = t * t, t3 = t2 * t;
  const double guess = (2 * t3 - 3 * t2 + 1) * v_[k] + (t3 - 2 * t2 + t) * h * slope_[k] +
                       (-2 * t3 + 3 * t2) * v_[i] + (t3 - t2) * h * slope_[i];
  if (!polish) return std::clamp(guess, v_[k], v_[i]);
  if (ax == x_[k]) return v_[k];
  auto f = [&](double v) {
    if (v <= v_[k]) return x_[k] - ax;
    if (v >= v_[i]) return x_[i] - ax;
    return x_of_v(v) - ax;
  };
  std::uintmax_t iters = 100;
  const auto r = boost::math::tools::toms748_solve(f, v_[k], v_[i], x_[k] - ax, x_[i] - ax,
                                                    boost::math::tools::eps_tolerance<double>(48),
                                                    iters);
  return 0.5 * (r.first + r.second);
}

WKBProfile wkb_profile(WKBKind kind, double e0, double v_max, std::size_t n_table,
                       std::size_t m_max, unsigned threads) {
  if (n_table < 2) throw ValidationError("WKB profile needs n_table >= 2");
  if (kind == WKBKind::Zeta) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    if (!(e0 >= two_pi * (1.0 - 1e-6))) throw DomainError("zeta WKB potential needs e0 >= 2 pi");
    e0 = std::max(e0, two_pi);
    m_max = 0;
  } else {
    if (!(e0 > 1.0)) throw DomainError("prime WKB integral needs e0 > 1");
  }
  if (!(v_max > e0)) throw DomainError("WKB profile needs v_max > e0");
  if (kind == WKBKind::Primes && m_max == 0) m_max = default_m_max(v_max);

  std::vector<double> v(n_table), x(n_table);
  const double span = v_max - e0;
  for (std::size_t i = 0; i < n_table; ++i) {
    const double u = static_cast<double>(i) / static_cast<double>(n_table - 1);
    v[i] = e0 + span * u * u;
  }
  v.back() = v_max;
  parallel_for(n_table, threads, [&](std::size_t i) {
    x[i] = kind == WKBKind::Primes ? prime_wkb_x_of_v(v[i], e0, m_max) : zeta_wkb_x_of_v(v[i], e0);
  });
  return WKBProfile(kind, e0, m_max, std::move(v), std::move(x));
}

SampledPotential sample_profile(const WKBProfile& profile, double x_max, double dx,
                                unsigned threads) {
  const std::size_t count = symmetric_grid_points(x_max, dx);
  const std::size_t half = (count - 1) / 2;
  SampledPotential p;
  p.dx = dx;
  p.x0 = -static_cast<double>(half) * dx;
  p.method = profile.kind() == WKBKind::Primes ? PotentialMethod::WKBPrimes : PotentialMethod::WKBZeta;
  p.v_infinity = profile.v_max();
  p.values.assign(count, 0.0);
  // Evaluate x >= 0 and mirror: the profile is even by construction.
  std::vector<double> right(half + 1);
  parallel_for(half + 1, threads, [&](std::size_t i) {
    const double x = static_cast<double>(i) * dx;
    right[i] = x >= profile.x_max() ? profile.v_max() : profile.v_of_x(x);
  });
  for (std::size_t i = 0; i <= half; ++i) {
    p.values[half + i] = right[i];
    p.values[half - i] = right[i];
  }
  return p;
}

void write_profile_csv(std::ostream& out, const WKBProfile& profile,
                       const std::map<std::string, std::string>& extra_metadata) {
  csv::Metadata meta = extra_metadata;
  meta["kind"] = std::string(to_string(profile.kind()));
  meta["e0"] = csv::format_double(profile.e0());
  meta["m_max"] = std::to_string(profile.m_max());
  csv::write_metadata(out, meta);
  out << "V,x\n";
  for (std::size_t i = 0; i < profile.v_table().size(); ++i) {
    out << csv::format_double(profile.v_table()[i]) << ',' << csv::format_double(profile.x_table()[i])
        << '\n';
  }
}

WKBProfile read_profile_csv(std::istream& in) {
  const auto table = csv::read_table(in);
  if (table.header != std::vector<std::string>{"V", "x"}) {
    throw ValidationError("WKB profile CSV needs the header 'V,x'");
  }
  auto need = [&](const std::string& key) -> const std::string& {
    const auto it = table.metadata.find(key);
    if (it == table.metadata.end()) throw ValidationError("WKB profile CSV lacks '" + key + "'");
    return it->second;
  };
  const auto kind = wkb_kind_from_string(need("kind"));
  const double e0 = csv::parse_double(need("e0"));
  const auto m_max = static_cast<std::size_t>(std::stoull(need("m_max")));
  std::vector<double> v, x;
  for (const auto& row : table.rows) {
    v.push_back(row[0]);
    x.push_back(row[1]);
  }
  return WKBProfile(kind, e0, m_max, std::move(v), std::move(x));
}

}  // namespace spectral_forge::semiclassical
