#include "spectral_forge/fractal.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <thread>

#include <json.hpp>

#include "spectral_forge/csv.hpp"
#include "spectral_forge/errors.hpp"

namespace spectral_forge::fractal {

namespace {

constexpr std::size_t kMinSamples = 10000;

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

// Both coordinates rescaled to [0, 1].
struct Unit {
  std::vector<double> u, v;
};

Unit rescale(const DetrendedSignal& sig) {
  if (sig.x.size() != sig.xi.size()) throw ValidationError("signal x and xi lengths differ");
  if (sig.size() < 2) throw InsufficientData("signal needs at least two samples");
  const auto [xlo, xhi] = std::minmax_element(sig.x.begin(), sig.x.end());
  const auto [ylo, yhi] = std::minmax_element(sig.xi.begin(), sig.xi.end());
  if (!(*yhi > *ylo)) throw DegenerateSignal("signal is constant");
  if (!(*xhi > *xlo)) throw DegenerateSignal("signal has no extent in x");
  Unit r;
  r.u.resize(sig.size());
  r.v.resize(sig.size());
  const double sx = *xhi - *xlo, sy = *yhi - *ylo;
  for (std::size_t i = 0; i < sig.size(); ++i) {
    if (!std::isfinite(sig.xi[i]) || !std::isfinite(sig.x[i])) {
      throw ValidationError("signal contains non-finite values");
    }
    r.u[i] = (sig.x[i] - *xlo) / sx;
    r.v[i] = (sig.xi[i] - *ylo) / sy;
  }
  return r;
}

std::uint64_t box_index(double t, double eps, double offset, std::uint64_t limit) {
  const auto i = static_cast<std::uint64_t>(std::floor(t / eps + offset));
  return std::min(i, limit);
}

std::vector<std::size_t> counts_of(const Unit& unit, double eps, Variant variant, double ox,
                                   double oy) {
  const auto limit_x = static_cast<std::uint64_t>(std::ceil(1.0 / eps + ox)) - 1;
  const auto limit_y = static_cast<std::uint64_t>(std::ceil(1.0 / eps + oy)) - 1;
  const std::size_t n = unit.u.size();
  std::vector<std::uint64_t> keys(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto iy = box_index(unit.v[i], eps, oy, limit_y);
    if (variant == Variant::Marginal) {
      keys[i] = iy;
    } else {
      keys[i] = box_index(unit.u[i], eps, ox, limit_x) * (limit_y + 1) + iy;
    }
  }
  std::sort(keys.begin(), keys.end());
  std::vector<std::size_t> counts;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i + 1;
    while (j < n && keys[j] == keys[i]) ++j;
    counts.push_back(j - i);
    i = j;
  }
  return counts;
}

// Regression abscissa and ordinate of one (alpha, eps) point.
void renyi_point(const std::vector<std::size_t>& counts, std::size_t n, double alpha, double eps,
                 double& x, double& y) {
  const double total = static_cast<double>(n);
  if (alpha == 0.0) {
    x = -std::log(eps);
    y = std::log(static_cast<double>(counts.size()));
  } else if (alpha == 1.0) {
    double s = 0.0;
    for (auto c : counts) {
      const double p = static_cast<double>(c) / total;
      s += p * std::log(p);
    }
    x = std::log(eps);
    y = s;
  } else {
    double s = 0.0;
    for (auto c : counts) s += std::pow(static_cast<double>(c) / total, alpha);
    x = (alpha - 1.0) * std::log(eps);
    y = std::log(s);
  }
}

std::vector<double> estimate(const Unit& unit, const std::vector<double>& eps,
                             const std::vector<double>& alphas, Variant variant, double ox,
                             double oy, std::vector<double>* r2) {
  std::vector<std::vector<std::size_t>> counts(eps.size());
  for (std::size_t k = 0; k < eps.size(); ++k) counts[k] = counts_of(unit, eps[k], variant, ox, oy);
  std::vector<double> d(alphas.size());
  if (r2) r2->assign(alphas.size(), 0.0);
  std::vector<double> xs(eps.size()), ys(eps.size());
  for (std::size_t a = 0; a < alphas.size(); ++a) {
    for (std::size_t k = 0; k < eps.size(); ++k) {
      renyi_point(counts[k], unit.u.size(), alphas[a], eps[k], xs[k], ys[k]);
    }
    const auto fit = fit_line(xs, ys);
    d[a] = fit.slope;
    if (r2) (*r2)[a] = fit.r2;
  }
  return d;
}

// Uniform double in [0, 1) from the top 53 bits; identical on every platform.
double unit_draw(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

DetrendedSignal detrend(const SampledPotential& inv, const semiclassical::WKBProfile& sc,
                        double x_lo, double x_hi, bool polish) {
  inv.validate();
  if (!(x_hi > x_lo)) throw ValidationError("detrend window needs x_hi > x_lo");
  const double slack = 1e-9 * std::max(1.0, std::abs(x_hi));
  if (inv.x0 > x_lo + slack || inv.x_end() < x_hi - slack) {
    throw CoverageError("potential grid does not cover [" + std::to_string(x_lo) + ", " +
                        std::to_string(x_hi) + "]");
  }
  if (sc.x_max() < std::max(std::abs(x_lo), std::abs(x_hi)) - slack) {
    throw CoverageError("semiclassical table ends at x = " + std::to_string(sc.x_max()));
  }
  DetrendedSignal s;
  for (std::size_t i = 0; i < inv.size(); ++i) {
    const double x = inv.x(i);
    if (x < x_lo - slack || x > x_hi + slack) continue;
    const double xc = std::clamp(x, -sc.x_max(), sc.x_max());
    s.x.push_back(x);
    s.xi.push_back(inv.values[i] - sc.v_of_x(xc, polish));
  }
  return s;
}

std::string_view to_string(Variant v) { return v == Variant::Marginal ? "marginal" : "2d"; }

Variant variant_from_string(std::string_view name) {
  if (name == "2d" || name == "two-dimensional") return Variant::TwoDimensional;
  if (name == "marginal") return Variant::Marginal;
  throw ValidationError("unknown box-counting variant '" + std::string(name) + "'");
}

std::vector<double> default_alphas() {
  std::vector<double> a;
  for (int i = -20; i <= 20; ++i) a.push_back(0.5 * i);
  return a;
}

std::vector<std::size_t> box_counts(const DetrendedSignal& sig, double eps, Variant variant,
                                    double offset_x, double offset_y) {
  if (!(eps > 0.0 && eps <= 1.0)) throw ValidationError("box side must lie in (0, 1]");
  return counts_of(rescale(sig), eps, variant, offset_x, offset_y);
}

std::vector<double> eps_ladder(const DetrendedSignal& sig, Variant variant, double min_per_box) {
  const auto unit = rescale(sig);
  const double n = static_cast<double>(sig.size());
  std::vector<double> eps;
  for (int k = 0; k <= 40; ++k) {
    const double e = std::ldexp(1.0, -k);
    const auto c = counts_of(unit, e, variant, 0.0, 0.0);
    if (n / static_cast<double>(c.size()) < min_per_box) break;
    eps.push_back(e);
  }
  return eps;
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw ValidationError("line fit needs two or more points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LineFit f;
  if (sxx == 0.0) throw ValidationError("line fit needs distinct abscissae");
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return f;
}

LineFit box_count_dimension(const DetrendedSignal& sig, const std::vector<double>& eps,
                            Variant variant) {
  const auto unit = rescale(sig);
  std::vector<double> xs, ys;
  for (double e : eps) {
    xs.push_back(-std::log(e));
    ys.push_back(std::log(static_cast<double>(counts_of(unit, e, variant, 0.0, 0.0).size())));
  }
  return fit_line(xs, ys);
}

RenyiSpectrum renyi_dimension(const DetrendedSignal& sig, const RenyiOptions& options) {
  if (sig.size() < kMinSamples) {
    throw InsufficientData("Renyi estimate needs at least " + std::to_string(kMinSamples) +
                           " samples, got " + std::to_string(sig.size()));
  }
  if (options.alphas.empty()) throw ValidationError("no alpha values requested");
  const auto unit = rescale(sig);

  std::vector<double> eps = options.eps;
  for (double e : eps) {
    if (!(e > 0.0 && e <= 1.0)) throw ValidationError("box side must lie in (0, 1]");
  }
  std::sort(eps.begin(), eps.end(), std::greater<>());
  const bool automatic = eps.empty();
  if (automatic) eps = eps_ladder(sig, options.variant);
  // The span is judged on the ladder before the end levels are dropped.
  if (eps.size() < (automatic ? 6u : 4u) || eps.front() / eps.back() < 100.0 * (1.0 - 1e-12)) {
    throw InsufficientData("box ladder needs at least 4 levels spanning 2 decades");
  }
  if (automatic) eps = std::vector<double>(eps.begin() + 1, eps.end() - 1);

  RenyiSpectrum r;
  r.variant = options.variant;
  r.eps = eps;
  r.samples = sig.size();
  for (auto c : counts_of(unit, eps.back(), options.variant, 0.0, 0.0)) r.singleton_boxes += c == 1;

  std::vector<double> r2;
  const auto d = estimate(unit, eps, options.alphas, options.variant, 0.0, 0.0, &r2);

  // Replicates on randomly shifted box grids.
  std::mt19937_64 rng(options.seed);
  std::vector<std::pair<double, double>> offsets(options.bootstrap);
  for (auto& o : offsets) {
    o.first = options.variant == Variant::Marginal ? 0.0 : unit_draw(rng);
    o.second = unit_draw(rng);
  }
  std::vector<std::vector<double>> reps(options.bootstrap);
  parallel_for(options.bootstrap, options.threads, [&](std::size_t b) {
    reps[b] = estimate(unit, eps, options.alphas, options.variant, offsets[b].first,
                       offsets[b].second, nullptr);
  });

  r.estimates.resize(options.alphas.size());
  for (std::size_t a = 0; a < options.alphas.size(); ++a) {
    auto& e = r.estimates[a];
    e.alpha = options.alphas[a];
    e.d = d[a];
    e.r2 = r2[a];
    e.poor_fit = r2[a] < options.min_r2;
    e.reliable = e.alpha >= options.reliable_alpha;
    if (reps.size() > 1) {
      double mean = 0.0;
      for (const auto& rep : reps) mean += rep[a];
      mean /= static_cast<double>(reps.size());
      double var = 0.0;
      for (const auto& rep : reps) var += (rep[a] - mean) * (rep[a] - mean);
      e.spread = std::sqrt(var / static_cast<double>(reps.size() - 1));
    }
    if (e.reliable) r.noise = std::max(r.noise, e.spread);
  }
  return r;
}

RenyiSummary renyi_report(const RenyiSpectrum& spectrum) {
  RenyiSummary s;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  s.d0 = s.d1 = s.d2 = nan;
  s.noise = spectrum.noise;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  const AlphaEstimate* prev = nullptr;
  for (const auto& e : spectrum.estimates) {
    if (e.alpha == 0.0) s.d0 = e.d;
    if (e.alpha == 1.0) s.d1 = e.d;
    if (e.alpha == 2.0) s.d2 = e.d;
    s.poor_fits += e.poor_fit;
    if (!e.reliable) continue;
    lo = std::min(lo, e.d);
    hi = std::max(hi, e.d);
    if (prev && e.alpha > prev->alpha && e.d > prev->d + spectrum.noise) ++s.monotonicity_violations;
    prev = &e;
  }
  s.spread = hi >= lo ? hi - lo : 0.0;
  s.multifractal = s.spread > 3.0 * s.noise;
  return s;
}

void write_spectrum_csv(std::ostream& out, const RenyiSpectrum& spectrum,
                        const std::map<std::string, std::string>& extra_metadata) {
  csv::Metadata meta = extra_metadata;
  meta["variant"] = std::string(to_string(spectrum.variant));
  meta["noise"] = csv::format_double(spectrum.noise);
  meta["samples"] = std::to_string(spectrum.samples);
  meta["eps_max"] = csv::format_double(spectrum.eps.front());
  meta["eps_min"] = csv::format_double(spectrum.eps.back());
  meta["eps_levels"] = std::to_string(spectrum.eps.size());
  csv::write_metadata(out, meta);
  out << "alpha,D_alpha,r2\n";
  for (const auto& e : spectrum.estimates) {
    out << csv::format_double(e.alpha) << ',' << csv::format_double(e.d) << ','
        << csv::format_double(e.r2) << '\n';
  }
}

std::string spectrum_summary_json(const RenyiSpectrum& spectrum,
                                  const std::map<std::string, std::string>& extra_metadata) {
  const auto s = renyi_report(spectrum);
  auto num = [](double v) { return std::isnan(v) ? nlohmann::ordered_json() : nlohmann::ordered_json(v); };
  nlohmann::ordered_json j;
  for (const auto& [k, v] : extra_metadata) j["metadata"][k] = v;
  j["variant"] = std::string(to_string(spectrum.variant));
  j["samples"] = spectrum.samples;
  j["eps"] = spectrum.eps;
  j["D0"] = num(s.d0);
  j["D1"] = num(s.d1);
  j["D2"] = num(s.d2);
  j["noise"] = s.noise;
  j["spread"] = s.spread;
  j["multifractal"] = s.multifractal;
  j["monotonicity_violations"] = s.monotonicity_violations;
  j["poor_fits"] = s.poor_fits;
  j["singleton_boxes_at_smallest_eps"] = spectrum.singleton_boxes;
  std::vector<double> unreliable;
  for (const auto& e : spectrum.estimates) {
    if (!e.reliable) unreliable.push_back(e.alpha);
  }
  if (!unreliable.empty()) j["unreliable_alphas"] = unreliable;
  return j.dump(2) + "\n";
}

DetrendedSignal weierstrass_signal(double a, double b, std::size_t n) {
  if (!(a > 0.0 && a < 1.0 && b > 1.0 && a * b > 1.0)) {
    throw ValidationError("Weierstrass parameters need 0 < a < 1 < b and a b > 1");
  }
  if (n < 2) throw ValidationError("Weierstrass signal needs two or more points");
  std::vector<double> amp, freq;
  for (double ak = 1.0, bk = 1.0; bk < static_cast<double>(n); ak *= a, bk *= b) {
    amp.push_back(ak);
    freq.push_back(bk * std::numbers::pi);
  }
  DetrendedSignal s;
  s.x.resize(n);
  s.xi.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = static_cast<double>(i) / static_cast<double>(n - 1);
    s.x[i] = x;
    for (std::size_t k = 0; k < amp.size(); ++k) s.xi[i] += amp[k] * std::cos(freq[k] * x);
  }
  return s;
}

Calibration weierstrass_calibration(double a, double b, std::size_t n, unsigned threads) {
  RenyiOptions o;
  o.alphas = {0.0};
  o.bootstrap = 0;
  o.threads = threads;
  const auto r = renyi_dimension(weierstrass_signal(a, b, n), o);
  return {2.0 + std::log(a) / std::log(b), r.estimates.front().d};
}

}  // namespace spectral_forge::fractal
