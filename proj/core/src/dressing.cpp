#include "spectral_forge/dressing.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "spectral_forge/csv.hpp"
#include "spectral_forge/errors.hpp"
#include "spectral_forge/marchenko.hpp"

namespace spectral_forge::dressing {

DressingState initial_state(double x_max, double dx) {
  const std::size_t points = (symmetric_grid_points(x_max, dx) + 1) / 2;
  DressingState st;
  st.potential.x0 = 0.0;
  st.potential.dx = dx;
  st.potential.values.assign(points, 0.0);
  st.potential.method = PotentialMethod::Dressing;
  st.aux.assign(points, 0.0);
  return st;
}

namespace {

// Cubic interpolation of V at the cell midpoints x_i + dx/2, using V(-x) = V(x)
// at the left end and a one-sided stencil at the right end.
void midpoints(const std::vector<double>& v, std::vector<double>& mid) {
  const std::size_t m = v.size();
  mid.resize(m - 1);
  if (m < 4) {
    for (std::size_t i = 0; i + 1 < m; ++i) mid[i] = 0.5 * (v[i] + v[i + 1]);
    return;
  }
  mid[0] = (-v[1] + 9.0 * v[0] + 9.0 * v[1] - v[2]) / 16.0;
  for (std::size_t i = 1; i + 2 < m; ++i) {
    mid[i] = (-v[i - 1] + 9.0 * v[i] + 9.0 * v[i + 1] - v[i + 2]) / 16.0;
  }
  const std::size_t e = m - 1;
  mid[e - 1] = 0.0625 * v[e - 3] - 0.3125 * v[e - 2] + 0.9375 * v[e - 1] + 0.3125 * v[e];
}

}  // namespace

DressingState dress_step(DressingState st, double kappa_next, const StepOptions& options) {
  if (!(kappa_next > 0.0) || !std::isfinite(kappa_next)) {
    throw ValidationError("decay constant must be positive and finite");
  }
  for (double k : st.kappa) {
    if (k == kappa_next) throw DegenerateError("decay constant " + std::to_string(k) + " is already present");
  }
  if (!st.kappa.empty() && kappa_next < st.kappa.back()) {
    throw OrderError("levels are incorporated shallowest first: kappa " + std::to_string(kappa_next) +
                     " is below " + std::to_string(st.kappa.back()));
  }
  const double h = st.potential.dx;
  if (kappa_next * h > options.max_kappa_dx) {
    throw GridError("kappa dx = " + std::to_string(kappa_next * h) + " is too coarse");
  }
  auto& v = st.potential.values;
  const std::size_t m = v.size();
  std::vector<double> mid;
  midpoints(v, mid);

  const double k2 = kappa_next * kappa_next;
  auto f = [k2](double vv, double yy) { return vv + k2 - yy * yy; };
  // A nodeless seed keeps |y| of order sqrt(max |V + k^2|); running past a
  // node sends y to -infinity.
  double vmax = 0.0;
  for (double vi : v) vmax = std::max(vmax, std::abs(vi + k2));
  const double node_bound = 4.0 * std::sqrt(vmax) + 4.0 * kappa_next;
  auto& y = st.aux;
  y.assign(m, 0.0);
  double yy = 0.0;
  for (std::size_t i = 0; i + 1 < m; ++i) {
    const double f1 = f(v[i], yy);
    const double f2 = f(mid[i], yy + 0.5 * h * f1);
    const double f3 = f(mid[i], yy + 0.5 * h * f2);
    const double f4 = f(v[i + 1], yy + h * f3);
    const double next = yy + h / 6.0 * (f1 + 2.0 * f2 + 2.0 * f3 + f4);
    if (!std::isfinite(next) || next < -node_bound) {
      throw NodeError("auxiliary solution degenerates near x = " + std::to_string((i + 1) * h));
    }
    if (std::abs(next - yy) > options.max_relative_jump * (std::abs(yy) + kappa_next)) {
      throw GridError("auxiliary solution under-resolved near x = " + std::to_string((i + 1) * h));
    }
    yy = next;
    y[i + 1] = yy;
  }
  for (std::size_t i = 0; i < m; ++i) v[i] = 2.0 * y[i] * y[i] - v[i] - 2.0 * k2;
  st.kappa.push_back(kappa_next);
  st.level = st.kappa.size();
  st.potential.n_eigenvalues = st.level;
  return st;
}

std::vector<double> decay_constants(const spectra::Spectrum& s, std::optional<double> v_infinity) {
  return marchenko::bind_spectrum(s, v_infinity).kappa;
}

SampledPotential to_symmetric(const DressingState& st, double v_infinity, std::size_t n_eigenvalues) {
  const auto& half = st.potential.values;
  const std::size_t m = half.size();
  SampledPotential p;
  p.dx = st.potential.dx;
  p.x0 = -static_cast<double>(m - 1) * p.dx;
  p.method = PotentialMethod::Dressing;
  p.n_eigenvalues = n_eigenvalues;
  p.v_infinity = v_infinity;
  p.values.resize(2 * m - 1);
  for (std::size_t i = 0; i < m; ++i) {
    p.values[m - 1 + i] = v_infinity + half[i];
    p.values[m - 1 - i] = v_infinity + half[i];
  }
  return p;
}

SampledPotential dress_spectrum(const spectra::Spectrum& s, std::optional<double> v_infinity,
                                double x_max, double dx, const DressingOptions& options) {
  const auto b = marchenko::bind_spectrum(s, v_infinity);
  std::vector<double> kappa = b.kappa;
  std::sort(kappa.begin(), kappa.end());

  if (options.refine == 0) throw ValidationError("refine must be at least 1");
  const std::size_t coarse_points = (symmetric_grid_points(x_max, dx) + 1) / 2;
  const double fine_dx = dx / static_cast<double>(options.refine);
  const std::size_t fine_points = (coarse_points - 1) * options.refine + 1;

  DressingState st;
  if (options.resume) {
    st = *options.resume;
    if (std::abs(st.potential.dx - fine_dx) > 1e-12 * fine_dx || st.potential.size() != fine_points) {
      throw ValidationError("checkpoint grid does not match the requested grid");
    }
    if (st.level > kappa.size() || !std::equal(st.kappa.begin(), st.kappa.end(), kappa.begin())) {
      throw ValidationError("checkpoint decay constants do not match the spectrum");
    }
  } else {
    st = initial_state(static_cast<double>(fine_points - 1) * fine_dx, fine_dx);
    if (st.potential.size() != fine_points) throw ValidationError("refined grid is inconsistent");
  }

  for (std::size_t n = st.level; n < kappa.size(); ++n) {
    try {
      st = dress_step(std::move(st), kappa[n], options.step);
    } catch (const NumericalError& e) {
      throw DressingLevelError(n + 1, e.what());
    }
    if (options.on_level) options.on_level(st);
    if (options.checkpoint_path && options.checkpoint_every > 0 &&
        (st.level % options.checkpoint_every == 0 || st.level == kappa.size())) {
      std::ofstream out(*options.checkpoint_path);
      if (!out) throw ValidationError("cannot write checkpoint " + options.checkpoint_path->string());
      write_checkpoint(out, st);
    }
  }
  if (options.refine > 1) {
    std::vector<double> coarse(coarse_points), coarse_aux(coarse_points);
    for (std::size_t i = 0; i < coarse_points; ++i) {
      coarse[i] = st.potential.values[i * options.refine];
      coarse_aux[i] = st.aux[i * options.refine];
    }
    st.potential.values = std::move(coarse);
    st.aux = std::move(coarse_aux);
    st.potential.dx = dx;
  }
  return to_symmetric(st, b.v_infinity, kappa.size());
}

void write_checkpoint(std::ostream& out, const DressingState& st) {
  csv::Metadata meta;
  meta["format"] = "dressing-checkpoint";
  meta["level"] = std::to_string(st.level);
  meta["dx"] = csv::format_double(st.potential.dx);
  std::string ks;
  for (std::size_t i = 0; i < st.kappa.size(); ++i) {
    if (i) ks += ' ';
    ks += csv::format_double(st.kappa[i]);
  }
  meta["kappa"] = ks;
  csv::write_metadata(out, meta);
  out << "x,V,aux\n";
  std::string line;
  for (std::size_t i = 0; i < st.potential.size(); ++i) {
    line = csv::format_double(st.potential.x(i));
    line += ',';
    line += csv::format_double(st.potential.values[i]);
    line += ',';
    line += csv::format_double(st.aux[i]);
    line += '\n';
    out << line;
  }
}

DressingState read_checkpoint(std::istream& in) {
  const auto table = csv::read_table(in);
  auto need = [&](const std::string& key) -> const std::string& {
    const auto it = table.metadata.find(key);
    if (it == table.metadata.end()) throw ValidationError("checkpoint lacks '" + key + "'");
    return it->second;
  };
  if (need("format") != "dressing-checkpoint") throw ValidationError("not a dressing checkpoint");
  if (table.header != std::vector<std::string>{"x", "V", "aux"}) {
    throw ValidationError("checkpoint needs the header 'x,V,aux'");
  }
  DressingState st;
  st.level = static_cast<std::size_t>(std::stoull(need("level")));
  st.potential.dx = csv::parse_double(need("dx"));
  st.potential.x0 = 0.0;
  st.potential.method = PotentialMethod::Dressing;
  std::istringstream ks(need("kappa"));
  std::string tok;
  while (ks >> tok) st.kappa.push_back(csv::parse_double(tok));
  if (st.kappa.size() != st.level) throw ValidationError("checkpoint level and kappa list disagree");
  st.potential.n_eigenvalues = st.level;
  for (const auto& row : table.rows) {
    st.potential.values.push_back(row[1]);
    st.aux.push_back(row[2]);
  }
  st.potential.validate();
  return st;
}

}  // namespace spectral_forge::dressing
