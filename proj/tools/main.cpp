#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <spectral_forge/csv.hpp>
#include <spectral_forge/dressing.hpp>
#include <spectral_forge/errors.hpp>
#include <spectral_forge/fractal.hpp>
#include <spectral_forge/marchenko.hpp>
#include <spectral_forge/potential.hpp>
#include <spectral_forge/schrodinger.hpp>
#include <spectral_forge/semiclassical.hpp>
#include <spectral_forge/spectra.hpp>

#include "run_config.hpp"

namespace fs = std::filesystem;
using namespace spectral_forge;
using cli::RunConfig;

#ifndef SPECTRAL_FORGE_DEFAULT_ZEROS
#define SPECTRAL_FORGE_DEFAULT_ZEROS "data/zeta_zeros.txt"
#endif

namespace {

struct Common {
  std::string out_dir = ".";
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
};

struct SpectrumArgs {
  std::string kind = "harmonic";
  std::size_t n = 0;
  std::vector<double> values;
  std::string zeros_file = SPECTRAL_FORGE_DEFAULT_ZEROS;
};

void add_spectrum_options(CLI::App* cmd, SpectrumArgs& a) {
  cmd->add_option("--kind", a.kind, "primes | zeta | harmonic | triangular | custom")
      ->capture_default_str();
  cmd->add_option("--n", a.n, "number of eigenvalues");
  cmd->add_option("--values", a.values, "eigenvalues for --kind custom (ascending)");
  cmd->add_option("--zeros-file", a.zeros_file, "zeta-zero table")->capture_default_str();
}

spectra::Spectrum build_spectrum(const SpectrumArgs& a, RunConfig& cfg) {
  const auto kind = spectra::spectrum_kind_from_string(a.kind);
  cfg.set("kind", std::string(spectra::to_string(kind)));
  if (kind == spectra::SpectrumKind::Custom) {
    if (a.values.empty()) throw ValidationError("--kind custom needs --values");
    cfg.set("values", a.values);
    return spectra::Spectrum(kind, a.values);
  }
  if (a.n == 0) throw ValidationError("--n must be a positive count");
  cfg.set("n", static_cast<std::uint64_t>(a.n));
  switch (kind) {
    case spectra::SpectrumKind::Primes: return spectra::primes_upto_n(a.n);
    case spectra::SpectrumKind::ZetaZeros:
      cfg.set("zeros-file", fs::path(a.zeros_file).filename().string());
      return spectra::load_zeta_zeros(a.zeros_file, a.n);
    default: return spectra::reference_spectrum(kind, a.n);
  }
}

fs::path prepare_out_dir(const Common& c) {
  fs::path dir(c.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ValidationError("cannot create output directory " + dir.string());
  return dir;
}

std::string to_csv(const SampledPotential& p, const std::map<std::string, std::string>& meta) {
  std::ostringstream s;
  write_potential_csv(s, p, meta);
  return s.str();
}

void finish(const fs::path& dir, const RunConfig& cfg) {
  cli::write_text(dir / (cfg.command() + ".config"), cfg.to_config_file());
}

// ---------------------------------------------------------------------------

struct ConstructArgs {
  SpectrumArgs spectrum;
  std::optional<double> v_infinity;
  std::string method = "marchenko";
  double x_max = 10.0;
  double dx = 0.01;
  unsigned precision_bits = 53;
  std::size_t refine = 4;
  std::string checkpoint;
  std::size_t checkpoint_every = 0;
};

int cmd_construct(const ConstructArgs& a, const Common& c) {
  RunConfig cfg("construct");
  const auto s = build_spectrum(a.spectrum, cfg);
  if (a.method != "marchenko" && a.method != "dressing" && a.method != "both") {
    throw ValidationError("--method must be marchenko, dressing or both");
  }
  if (!(a.dx > 0.0) || !(a.x_max > 0.0)) throw ValidationError("--dx and --x-max must be positive");
  auto precision = marchenko::PrecisionOptions::from_environment();
  if (!std::getenv("SPECTRAL_FORGE_PRECISION_BITS")) precision.initial_bits = a.precision_bits;
  if (precision.initial_bits < 53) throw ValidationError("--precision-bits must be >= 53");
  cfg.set("method", a.method);
  cfg.set("x-max", a.x_max);
  cfg.set("dx", a.dx);
  if (a.v_infinity) cfg.set("vinf", *a.v_infinity);
  if (a.method != "dressing") cfg.set("precision-bits", static_cast<std::uint64_t>(precision.initial_bits));
  if (a.method != "marchenko") cfg.set("refine", static_cast<std::uint64_t>(a.refine));

  const auto dir = prepare_out_dir(c);
  auto meta = cfg.metadata();
  meta["kind"] = std::string(spectra::to_string(s.kind()));

  std::optional<SampledPotential> pm, pd;
  if (a.method != "dressing") {
    const auto b = marchenko::bind_spectrum(s, a.v_infinity);
    pm = marchenko::sample_potential(b, a.x_max, a.dx, {precision, c.threads});
    cli::write_text(dir / "potential_marchenko.csv", to_csv(*pm, meta));
  }
  if (a.method != "marchenko") {
    dressing::DressingOptions opts;
    opts.refine = a.refine;
    if (!a.checkpoint.empty()) {
      opts.checkpoint_path = a.checkpoint;
      opts.checkpoint_every = a.checkpoint_every;
    }
    pd = dressing::dress_spectrum(s, a.v_infinity, a.x_max, a.dx, opts);
    cli::write_text(dir / "potential_dressing.csv", to_csv(*pd, meta));
  }
  if (pm && pd) {
    if (pm->size() != pd->size()) throw ValidationError("marchenko and dressing grids differ");
    // Relative to the largest |V| on the compared range; the interior figure
    // leaves out 5% of the grid at each end.
    const std::size_t m = pm->size();
    const std::size_t lo = m / 20, hi = m - m / 20;
    double sup = 0.0, scale = 0.0, sup_in = 0.0, scale_in = 0.0;
    std::ostringstream csv_out;
    auto dmeta = meta;
    std::string rows;
    for (std::size_t i = 0; i < m; ++i) {
      const double d = std::abs(pm->values[i] - pd->values[i]);
      sup = std::max(sup, d);
      scale = std::max(scale, std::abs(pm->values[i]));
      if (i >= lo && i < hi) {
        sup_in = std::max(sup_in, d);
        scale_in = std::max(scale_in, std::abs(pm->values[i]));
      }
      rows += csv::format_double(pm->x(i)) + ',' + csv::format_double(pm->values[i]) + ',' +
              csv::format_double(pd->values[i]) + ',' + csv::format_double(d) + '\n';
    }
    dmeta["sup_abs_diff"] = csv::format_double(sup);
    dmeta["sup_rel_diff"] = csv::format_double(scale > 0 ? sup / scale : sup);
    dmeta["sup_rel_diff_interior90"] = csv::format_double(scale_in > 0 ? sup_in / scale_in : sup_in);
    csv::write_metadata(csv_out, dmeta);
    csv_out << "x,marchenko,dressing,abs_diff\n" << rows;
    cli::write_text(dir / "difference.csv", csv_out.str());
    std::cout << "sup relative difference " << dmeta["sup_rel_diff"] << " (interior 90%: "
              << dmeta["sup_rel_diff_interior90"] << ")\n";
  }
  finish(dir, cfg);
  return 0;
}

// ---------------------------------------------------------------------------

struct VerifyArgs {
  std::string potential;
  SpectrumArgs spectrum;
  double tolerance = 1e-4;
};

int cmd_verify(VerifyArgs a, const Common& c) {
  RunConfig cfg("verify");
  std::ifstream in(a.potential);
  if (!in) throw ValidationError("cannot open potential file '" + a.potential + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  std::istringstream meta_in(text), pot_in(text);
  const auto table = csv::read_table(meta_in);
  const auto p = read_potential_csv(pot_in);
  if (a.spectrum.n == 0) a.spectrum.n = p.n_eigenvalues;
  if (const auto it = table.metadata.find("kind"); it != table.metadata.end() && a.spectrum.kind.empty()) {
    a.spectrum.kind = it->second;
  }
  const auto target = build_spectrum(a.spectrum, cfg);
  cfg.set("potential", fs::path(a.potential).filename().string());
  cfg.set("potential-fnv", std::to_string(cli::fnv1a64(text)));
  cfg.set("tolerance", a.tolerance);

  const auto solved = schrodinger::solve_eigenvalues(p, target.size(), {a.tolerance, c.threads});
  const auto report = schrodinger::compare_spectra(target, solved);
  const auto dir = prepare_out_dir(c);
  std::ostringstream csv_out;
  schrodinger::write_report_csv(csv_out, report, cfg.metadata());
  cli::write_text(dir / "eigen_report.csv", csv_out.str());
  cli::write_text(dir / "eigen_summary.json", schrodinger::report_summary_json(report, cfg.metadata()));
  const auto s = report.parity_summary(false);
  std::cout << "levels " << report.entries.size() << ", max abs error " << s.max_abs_error
            << ", max rel error " << s.max_rel_error << "\n";
  finish(dir, cfg);
  return 0;
}

// ---------------------------------------------------------------------------

struct WkbArgs {
  std::string kind = "primes";
  std::optional<double> e0;
  double v_max = 1000.0;
  std::size_t table_size = 2000;
  std::size_t m_max = 0;
  double x_max = 0.0;
  double dx = 0.01;
};

int cmd_wkb(const WkbArgs& a, const Common& c) {
  RunConfig cfg("wkb");
  const auto kind = semiclassical::wkb_kind_from_string(a.kind);
  const double e0 = a.e0.value_or(semiclassical::default_e0(kind));
  cfg.set("kind", std::string(semiclassical::to_string(kind)));
  cfg.set("e0", e0);
  cfg.set("v-max", a.v_max);
  cfg.set("table-size", static_cast<std::uint64_t>(a.table_size));
  if (kind == semiclassical::WKBKind::Primes) cfg.set("m-max", static_cast<std::uint64_t>(a.m_max));
  const auto profile = semiclassical::wkb_profile(kind, e0, a.v_max, a.table_size, a.m_max, c.threads);
  const auto dir = prepare_out_dir(c);
  std::ostringstream out;
  semiclassical::write_profile_csv(out, profile, cfg.metadata());
  if (a.x_max > 0.0) {
    cfg.set("x-max", a.x_max);
    cfg.set("dx", a.dx);
    const auto p = semiclassical::sample_profile(profile, a.x_max, a.dx, c.threads);
    std::ostringstream pout;
    write_potential_csv(pout, p, cfg.metadata());
    cli::write_text(dir / "wkb_potential.csv", pout.str());
  }
  // Rewritten after the optional keys are known, so both files carry one hash.
  out.str("");
  semiclassical::write_profile_csv(out, profile, cfg.metadata());
  cli::write_text(dir / "wkb_profile.csv", out.str());
  std::cout << "profile " << profile.v_table().size() << " nodes, x in [0, " << profile.x_max() << "]\n";
  finish(dir, cfg);
  return 0;
}

// ---------------------------------------------------------------------------

struct FractalArgs {
  std::string potential;
  std::string profile;
  double x_lo = 0.0;
  double x_hi = 10.0;
  double alpha_min = -10.0;
  double alpha_max = 10.0;
  double alpha_step = 0.5;
  std::string variant = "2d";
  std::size_t bootstrap = 16;
  std::uint64_t seed = fractal::RenyiOptions{}.seed;
  bool polish = false;
};

std::string slurp(const std::string& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw ValidationError(std::string("cannot open ") + what + " file '" + path + "'");
  std::stringstream b;
  b << in.rdbuf();
  return b.str();
}

int cmd_fractal(const FractalArgs& a, const Common& c) {
  RunConfig cfg("fractal");
  if (!(a.alpha_step > 0.0) || !(a.alpha_max >= a.alpha_min)) {
    throw ValidationError("alpha grid needs alpha-step > 0 and alpha-max >= alpha-min");
  }
  const std::string pot_text = slurp(a.potential, "potential");
  const std::string prof_text = slurp(a.profile, "profile");
  std::istringstream pot_in(pot_text), prof_in(prof_text);
  const auto p = read_potential_csv(pot_in);
  const auto profile = semiclassical::read_profile_csv(prof_in);

  fractal::RenyiOptions o;
  const auto steps = static_cast<long>(std::floor((a.alpha_max - a.alpha_min) / a.alpha_step + 1e-9));
  o.alphas.clear();
  for (long k = 0; k <= steps; ++k) o.alphas.push_back(a.alpha_min + static_cast<double>(k) * a.alpha_step);
  o.variant = fractal::variant_from_string(a.variant);
  o.bootstrap = a.bootstrap;
  o.seed = a.seed;
  o.threads = c.threads;

  cfg.set("potential", fs::path(a.potential).filename().string());
  cfg.set("potential-fnv", std::to_string(cli::fnv1a64(pot_text)));
  cfg.set("profile", fs::path(a.profile).filename().string());
  cfg.set("profile-fnv", std::to_string(cli::fnv1a64(prof_text)));
  cfg.set("x-lo", a.x_lo);
  cfg.set("x-hi", a.x_hi);
  cfg.set("alpha-min", a.alpha_min);
  cfg.set("alpha-max", a.alpha_max);
  cfg.set("alpha-step", a.alpha_step);
  cfg.set("variant", std::string(fractal::to_string(o.variant)));
  cfg.set("bootstrap", static_cast<std::uint64_t>(a.bootstrap));
  cfg.set("seed", a.seed);
  cfg.set("polish", a.polish);

  const auto sig = fractal::detrend(p, profile, a.x_lo, a.x_hi, a.polish);
  const auto spectrum = fractal::renyi_dimension(sig, o);
  const auto dir = prepare_out_dir(c);
  std::ostringstream out;
  fractal::write_spectrum_csv(out, spectrum, cfg.metadata());
  cli::write_text(dir / "renyi.csv", out.str());
  cli::write_text(dir / "renyi_summary.json", fractal::spectrum_summary_json(spectrum, cfg.metadata()));
  const auto r = fractal::renyi_report(spectrum);
  std::cout << "D0 " << r.d0 << ", D1 " << r.d1 << ", D2 " << r.d2 << ", noise " << r.noise
            << (r.multifractal ? ", multifractal" : "") << "\n";
  finish(dir, cfg);
  return 0;
}

// ---------------------------------------------------------------------------

int cmd_spectrum(const SpectrumArgs& a, const Common& c) {
  RunConfig cfg("spectrum");
  const auto s = build_spectrum(a, cfg);
  const auto dir = prepare_out_dir(c);
  std::ostringstream out;
  csv::write_metadata(out, cfg.metadata());
  spectra::write_spectrum_csv(out, s);
  cli::write_text(dir / "spectrum.csv", out.str());
  finish(dir, cfg);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reflectionless potentials from prescribed spectra"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML-style key=value file; command-line flags take precedence");
  Common common;
  app.add_option("--out-dir", common.out_dir, "output directory")->capture_default_str();
  app.add_option("--threads", common.threads, "worker threads (default: available cores)")
      ->check(CLI::Range(1u, 4096u));

  ConstructArgs ca;
  auto* construct = app.add_subcommand("construct", "build a potential from a spectrum");
  add_spectrum_options(construct, ca.spectrum);
  construct->add_option("--vinf", ca.v_infinity, "asymptote (default: midpoint to the next level)");
  construct->add_option("--method", ca.method, "marchenko | dressing | both")->capture_default_str();
  construct->add_option("--x-max", ca.x_max, "grid half-width")->capture_default_str();
  construct->add_option("--dx", ca.dx, "grid spacing")->capture_default_str();
  construct->add_option("--precision-bits", ca.precision_bits, "initial working precision")
      ->capture_default_str();
  construct->add_option("--refine", ca.refine, "dressing substeps per grid cell")->capture_default_str();
  construct->add_option("--checkpoint", ca.checkpoint, "dressing checkpoint file");
  construct->add_option("--checkpoint-every", ca.checkpoint_every, "levels between checkpoints");

  VerifyArgs va;
  va.spectrum.kind.clear();
  auto* verify = app.add_subcommand("verify", "forward-solve a potential and compare spectra");
  verify->add_option("--potential", va.potential, "potential CSV")->required();
  add_spectrum_options(verify, va.spectrum);
  verify->add_option("--tolerance", va.tolerance, "eigenvalue tolerance")->capture_default_str();

  WkbArgs wa;
  auto* wkb = app.add_subcommand("wkb", "semiclassical potential profile");
  wkb->add_option("--kind", wa.kind, "primes | zeta")->capture_default_str();
  wkb->add_option("--e0", wa.e0, "reference energy");
  wkb->add_option("--v-max", wa.v_max, "top of the table")->capture_default_str();
  wkb->add_option("--table-size", wa.table_size, "table nodes")->capture_default_str();
  wkb->add_option("--m-max", wa.m_max, "Moebius truncation (0: floor(log2 v-max))");
  wkb->add_option("--x-max", wa.x_max, "also sample V(x) on [-x-max, x-max]");
  wkb->add_option("--dx", wa.dx, "sampling step")->capture_default_str();

  FractalArgs fa;
  auto* frac = app.add_subcommand("fractal", "Renyi dimensions of a de-trended potential");
  frac->add_option("--potential", fa.potential, "potential CSV")->required();
  frac->add_option("--profile", fa.profile, "WKB profile CSV")->required();
  frac->add_option("--x-lo", fa.x_lo)->capture_default_str();
  frac->add_option("--x-hi", fa.x_hi)->capture_default_str();
  frac->add_option("--alpha-min", fa.alpha_min)->capture_default_str();
  frac->add_option("--alpha-max", fa.alpha_max)->capture_default_str();
  frac->add_option("--alpha-step", fa.alpha_step)->capture_default_str();
  frac->add_option("--variant", fa.variant, "2d | marginal")->capture_default_str();
  frac->add_option("--bootstrap", fa.bootstrap, "shifted box grids for the noise estimate")
      ->capture_default_str();
  frac->add_option("--seed", fa.seed)->capture_default_str();
  frac->add_flag("--polish", fa.polish, "root-polish the profile at every sample");

  SpectrumArgs sa;
  auto* spec = app.add_subcommand("spectrum", "write a target spectrum");
  add_spectrum_options(spec, sa);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*construct) return cmd_construct(ca, common);
    if (*verify) return cmd_verify(va, common);
    if (*wkb) return cmd_wkb(wa, common);
    if (*frac) return cmd_fractal(fa, common);
    if (*spec) return cmd_spectrum(sa, common);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
