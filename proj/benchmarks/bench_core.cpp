#include <benchmark/benchmark.h>

#include <spectral_forge/dressing.hpp>
#include <spectral_forge/fractal.hpp>
#include <spectral_forge/marchenko.hpp>
#include <spectral_forge/schrodinger.hpp>
#include <spectral_forge/semiclassical.hpp>

using namespace spectral_forge;

static void BM_PotentialAt(benchmark::State& state) {
  const marchenko::Evaluator ev(
      marchenko::bind_spectrum(spectra::reference_spectrum(spectra::SpectrumKind::Harmonic, state.range(0))),
      marchenko::PrecisionOptions{});
  double x = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(ev.potential_at(x));
    x = x > 2.0 ? 0.0 : x + 0.01;
  }
}
BENCHMARK(BM_PotentialAt)->Arg(10)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

static void BM_DressStep(benchmark::State& state) {
  const auto base = dressing::dress_step(dressing::initial_state(10.0, 0.001), 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(dressing::dress_step(base, 2.0));
}
BENCHMARK(BM_DressStep)->Unit(benchmark::kMillisecond);

static void BM_NodeCount(benchmark::State& state) {
  const auto p = dressing::dress_spectrum(spectra::primes_upto_n(50), std::nullopt, 10.0, 0.005);
  for (auto _ : state) benchmark::DoNotOptimize(schrodinger::node_count(p, 100.0, 2.0));
}
BENCHMARK(BM_NodeCount)->Unit(benchmark::kMicrosecond);

static void BM_PrimeProfileIntegral(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(semiclassical::prime_wkb_x_of_v(1e4, 2.0));
}
BENCHMARK(BM_PrimeProfileIntegral)->Unit(benchmark::kMicrosecond);

static void BM_RenyiWeierstrass(benchmark::State& state) {
  const auto sig = fractal::weierstrass_signal(0.7, 2.0, 100000);
  fractal::RenyiOptions o;
  o.bootstrap = 0;
  for (auto _ : state) benchmark::DoNotOptimize(fractal::renyi_dimension(sig, o));
}
BENCHMARK(BM_RenyiWeierstrass)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
