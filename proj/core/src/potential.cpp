#include "spectral_forge/potential.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

#include "spectral_forge/csv.hpp"
#include "spectral_forge/errors.hpp"

namespace spectral_forge {

std::string_view to_string(PotentialMethod method) {
  switch (method) {
    case PotentialMethod::Marchenko: return "marchenko";
    case PotentialMethod::Dressing: return "dressing";
    case PotentialMethod::WKBPrimes: return "wkb-primes";
    case PotentialMethod::WKBZeta: return "wkb-zeta";
    case PotentialMethod::Analytic: return "analytic";
  }
  return "analytic";
}

PotentialMethod potential_method_from_string(std::string_view name) {
  if (name == "marchenko") return PotentialMethod::Marchenko;
  if (name == "dressing") return PotentialMethod::Dressing;
  if (name == "wkb-primes") return PotentialMethod::WKBPrimes;
  if (name == "wkb-zeta") return PotentialMethod::WKBZeta;
  if (name == "analytic") return PotentialMethod::Analytic;
  throw ValidationError("unknown potential method '" + std::string(name) + "'");
}

void SampledPotential::validate() const {
  if (!(dx > 0.0) || !std::isfinite(dx)) throw ValidationError("potential grid needs dx > 0");
  if (values.size() < 2) throw ValidationError("potential needs at least two samples");
  for (double v : values) {
    if (!std::isfinite(v)) throw ValidationError("potential contains a non-finite value");
  }
}

std::size_t symmetric_grid_points(double x_max, double dx) {
  if (!(x_max > 0.0) || !(dx > 0.0)) throw ValidationError("grid needs x_max > 0 and dx > 0");
  const double half = x_max / dx;
  const double rounded = std::round(half);
  if (std::abs(half - rounded) > 1e-9 * std::max(1.0, half)) {
    throw ValidationError("x_max must be an integer multiple of dx");
  }
  return 2 * static_cast<std::size_t>(rounded) + 1;
}

double symmetry_defect(const SampledPotential& p) {
  const std::size_t n = p.size();
  double worst = 0.0;
  for (std::size_t i = 0; i < n / 2; ++i) {
    worst = std::max(worst, std::abs(p.values[i] - p.values[n - 1 - i]));
  }
  return worst;
}

void write_potential_csv(std::ostream& out, const SampledPotential& p,
                         const std::map<std::string, std::string>& extra_metadata) {
  csv::Metadata meta = extra_metadata;
  meta["method"] = std::string(to_string(p.method));
  meta["n"] = std::to_string(p.n_eigenvalues);
  meta["v_infinity"] = csv::format_double(p.v_infinity);
  meta["dx"] = csv::format_double(p.dx);
  meta["x0"] = csv::format_double(p.x0);
  csv::write_metadata(out, meta);
  out << "x,V\n";
  std::string line;
  for (std::size_t i = 0; i < p.size(); ++i) {
    line = csv::format_double(p.x(i));
    line += ',';
    line += csv::format_double(p.values[i]);
    line += '\n';
    out << line;
  }
}

SampledPotential read_potential_csv(std::istream& in) {
  const auto table = csv::read_table(in);
  if (table.header.size() != 2 || table.header[0] != "x" || table.header[1] != "V") {
    throw ValidationError("potential CSV needs the header 'x,V'");
  }
  if (table.rows.size() < 2) throw ValidationError("potential CSV holds fewer than two samples");
  SampledPotential p;
  auto meta = [&](const std::string& key) -> const std::string* {
    const auto it = table.metadata.find(key);
    return it == table.metadata.end() ? nullptr : &it->second;
  };
  p.x0 = meta("x0") ? csv::parse_double(*meta("x0")) : table.rows.front()[0];
  p.dx = meta("dx") ? csv::parse_double(*meta("dx")) : table.rows[1][0] - table.rows[0][0];
  if (const auto* m = meta("method")) p.method = potential_method_from_string(*m);
  if (const auto* n = meta("n")) p.n_eigenvalues = static_cast<std::size_t>(std::stoull(*n));
  if (const auto* v = meta("v_infinity")) p.v_infinity = csv::parse_double(*v);
  p.values.reserve(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const double expected = p.x(i);
    if (std::abs(table.rows[i][0] - expected) > 1e-9 * std::max(1.0, std::abs(expected))) {
      throw ValidationError("potential CSV grid is not uniform at row " + std::to_string(i + 1));
    }
    p.values.push_back(table.rows[i][1]);
  }
  p.validate();
  return p;
}

}  // namespace spectral_forge
