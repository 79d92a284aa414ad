#include "spectral_forge/schrodinger.hpp"

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <exception>
#include <limits>
#include <ostream>
#include <thread>

#include <json.hpp>

#include "spectral_forge/csv.hpp"
#include "spectral_forge/errors.hpp"

namespace spectral_forge::schrodinger {

namespace {

// Potential continued by v_infinity over `pad` extra points on each side.
struct Extended {
  std::vector<double> v;
  double h = 0.0;
};

Extended extend(const SampledPotential& p, double padding) {
  Extended e;
  e.h = p.dx;
  const auto pad = static_cast<std::size_t>(std::ceil(padding / p.dx));
  e.v.assign(p.size() + 2 * pad, p.v_infinity);
  std::copy(p.values.begin(), p.values.end(), e.v.begin() + static_cast<std::ptrdiff_t>(pad));
  return e;
}

// Numerov for psi'' = (V - E) psi is the symmetric tridiagonal system
// phi_{i+1} - (12 / f_i - 10) phi_i + phi_{i-1} = 0 in phi_i = f_i psi_i,
// f_i = 1 + h^2 (E - V_i) / 12. Its Sturm count (sign changes of the
// Dirichlet solution) is the number of discrete eigenvalues below E. The
// ratio form r_i = phi_{i+1} / phi_i never overflows.
std::size_t count_nodes(const Extended& e, double energy, unsigned stride) {
  const double h = e.h * stride;
  const double c = h * h / 12.0;
  const std::size_t m = (e.v.size() - 1) / stride + 1;
  std::size_t nodes = 0;
  double r = std::numeric_limits<double>::infinity();  // phi_0 = 0
  for (std::size_t i = 1; i + 1 < m; ++i) {
    const double f = 1.0 + c * (energy - e.v[i * stride]);
    if (!(f > 0.0)) throw GridTooCoarse("grid step too large for the potential range");
    r = (12.0 / f - 10.0) - 1.0 / r;
    if (r == 0.0) r = std::numeric_limits<double>::min();
    if (r < 0.0) ++nodes;
  }
  return nodes;
}

// Smallest energy with count > level, bisected to `tol`.
double bisect_level(const Extended& e, std::size_t level, double lo, double hi, double tol,
                    unsigned stride) {
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (count_nodes(e, mid, stride) > level) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
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

std::size_t node_count(const SampledPotential& p, double e, double padding, unsigned stride) {
  if (stride != 1 && stride != 2) throw ValidationError("stride must be 1 or 2");
  return count_nodes(extend(p, padding), e, stride);
}

std::vector<double> EigenReport::recovered() const {
  std::vector<double> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.recovered);
  return out;
}

ParitySummary EigenReport::parity_summary(bool skip_first) const {
  ParitySummary s;
  double even = 0.0, odd = 0.0, rel = 0.0;
  std::size_t used = 0;
  for (const auto& e : entries) {
    if (skip_first && e.n == 1) continue;
    if (std::isnan(e.abs_error)) continue;
    if (e.n % 2 == 0) {
      even += e.abs_error;
      ++s.even_count;
    } else {
      odd += e.abs_error;
      ++s.odd_count;
    }
    s.max_abs_error = std::max(s.max_abs_error, e.abs_error);
    s.max_rel_error = std::max(s.max_rel_error, e.rel_error);
    rel += e.rel_error;
    ++used;
  }
  if (s.even_count) s.even_mean_abs_error = even / static_cast<double>(s.even_count);
  if (s.odd_count) s.odd_mean_abs_error = odd / static_cast<double>(s.odd_count);
  if (used) s.mean_rel_error = rel / static_cast<double>(used);
  return s;
}

EigenReport solve_eigenvalues(const SampledPotential& p, std::size_t n_levels,
                              const SolveOptions& options) {
  p.validate();
  if (n_levels == 0) throw ValidationError("n_levels must be positive");
  if (!(options.tolerance > 0.0)) throw ValidationError("tolerance must be positive");
  if (std::abs(p.x0 + p.x_end()) > 1e-9 * std::max(1.0, std::abs(p.x0))) {
    throw ValidationError("forward solver needs a grid symmetric about x = 0");
  }
  if (p.size() < 5) throw ValidationError("potential grid too short");
  const double tol = options.tolerance;
  const double v_inf = p.v_infinity;
  const double v_min = std::min(*std::min_element(p.values.begin(), p.values.end()), v_inf);

  // Padding: first a provisional one, then long enough that the weakest
  // requested state has decayed by e^-20 before the Dirichlet wall.
  double padding = 10.0;
  Extended ext = extend(p, padding);
  const double e_top_limit = v_inf - tol;
  if (count_nodes(ext, e_top_limit, 1) < n_levels) {
    throw InsufficientStates("fewer than " + std::to_string(n_levels) +
                             " bound states below v_infinity");
  }
  const double rough = bisect_level(ext, n_levels - 1, v_min, v_inf, 1e-6 * (v_inf - v_min), 1);
  const double kappa_top = std::sqrt(std::max(v_inf - rough, 1e-12));
  const double wanted = std::clamp(20.0 / kappa_top, 2.0, 4000.0);
  if (wanted > padding) {
    padding = wanted;
    ext = extend(p, padding);
  }
  padding = static_cast<double>((ext.v.size() - p.size()) / 2) * p.dx;
  if (count_nodes(ext, e_top_limit, 1) < n_levels) {
    throw InsufficientStates("fewer than " + std::to_string(n_levels) +
                             " bound states below v_infinity");
  }

  EigenReport report;
  report.meta.dx = p.dx;
  report.meta.tolerance = tol;
  report.meta.padding = padding;
  report.entries.resize(n_levels);
  const double width = tol / 256.0;
  parallel_for(n_levels, options.threads, [&](std::size_t level) {
    const double fine = bisect_level(ext, level, v_min, v_inf, width, 1);
    const double coarse = bisect_level(ext, level, v_min, v_inf, width, 2);
    const double diff = fine - coarse;
    if (std::abs(diff) > 10.0 * tol) {
      char buf[48];
      std::snprintf(buf, sizeof buf, "%.3e", std::abs(diff));
      throw GridTooCoarse("level " + std::to_string(level + 1) + ": dx and 2 dx disagree by " + buf +
                          ", above 10 x tolerance");
    }
    auto& e = report.entries[level];
    e.n = level + 1;
    e.recovered = fine + diff / 15.0;
    e.estimate = std::abs(diff) / 15.0;
    e.target = std::numeric_limits<double>::quiet_NaN();
    e.abs_error = e.rel_error = std::numeric_limits<double>::quiet_NaN();
  });
  for (std::size_t i = 1; i < n_levels; ++i) {
    if (!(report.entries[i].recovered > report.entries[i - 1].recovered)) {
      throw GridTooCoarse("recovered levels " + std::to_string(i) + " and " +
                          std::to_string(i + 1) + " are not separated at this tolerance");
    }
  }
  return report;
}

EigenReport compare_spectra(const spectra::Spectrum& target, std::span<const double> recovered) {
  if (target.size() != recovered.size()) {
    throw LengthMismatch("target has " + std::to_string(target.size()) + " levels, recovered " +
                         std::to_string(recovered.size()));
  }
  EigenReport r;
  r.entries.resize(recovered.size());
  for (std::size_t i = 0; i < recovered.size(); ++i) {
    auto& e = r.entries[i];
    e.n = i + 1;
    e.target = target[i];
    e.recovered = recovered[i];
    e.abs_error = std::abs(e.recovered - e.target);
    e.rel_error = e.target != 0.0 ? e.abs_error / std::abs(e.target) : e.abs_error;
  }
  return r;
}

EigenReport compare_spectra(const spectra::Spectrum& target, const EigenReport& solved) {
  auto r = compare_spectra(target, solved.recovered());
  r.meta = solved.meta;
  for (std::size_t i = 0; i < r.entries.size(); ++i) r.entries[i].estimate = solved.entries[i].estimate;
  return r;
}

void write_report_csv(std::ostream& out, const EigenReport& report,
                      const std::map<std::string, std::string>& extra_metadata) {
  csv::Metadata meta = extra_metadata;
  meta["dx"] = csv::format_double(report.meta.dx);
  meta["tolerance"] = csv::format_double(report.meta.tolerance);
  meta["extrapolation_order"] = std::to_string(report.meta.extrapolation_order);
  meta["padding"] = csv::format_double(report.meta.padding);
  csv::write_metadata(out, meta);
  out << "n,target,recovered,abs_err,rel_err\n";
  for (const auto& e : report.entries) {
    out << e.n << ',' << csv::format_double(e.target) << ',' << csv::format_double(e.recovered)
        << ',' << csv::format_double(e.abs_error) << ',' << csv::format_double(e.rel_error) << '\n';
  }
}

std::string report_summary_json(const EigenReport& report,
                                const std::map<std::string, std::string>& extra_metadata) {
  const auto all = report.parity_summary(false);
  const auto tail = report.parity_summary(true);
  auto stats = [](const ParitySummary& s) {
    return nlohmann::ordered_json{{"even_mean_abs_error", s.even_mean_abs_error},
                                  {"odd_mean_abs_error", s.odd_mean_abs_error},
                                  {"even_count", s.even_count},
                                  {"odd_count", s.odd_count},
                                  {"even_better", s.even_mean_abs_error < s.odd_mean_abs_error},
                                  {"max_abs_error", s.max_abs_error},
                                  {"max_rel_error", s.max_rel_error},
                                  {"mean_rel_error", s.mean_rel_error}};
  };
  double max_estimate = 0.0;
  for (const auto& e : report.entries) max_estimate = std::max(max_estimate, e.estimate);
  nlohmann::ordered_json j;
  for (const auto& [k, v] : extra_metadata) j["metadata"][k] = v;
  j["levels"] = report.entries.size();
  j["solver"] = {{"dx", report.meta.dx},
                 {"tolerance", report.meta.tolerance},
                 {"extrapolation_order", report.meta.extrapolation_order},
                 {"padding", report.meta.padding},
                 {"max_richardson_estimate", max_estimate}};
  j["parity"] = stats(all);
  j["parity_without_ground_state"] = stats(tail);
  return j.dump(2) + "\n";
}

}  // namespace spectral_forge::schrodinger
