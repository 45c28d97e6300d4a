#include <benchmark/benchmark.h>

#include <glidetime/decompose.hpp>
#include <glidetime/dynamics.hpp>
#include <glidetime/gbz.hpp>
#include <glidetime/phases.hpp>

namespace {

gt::ModelParams point(double t3, double t4, int cells) {
  gt::ModelParams p;
  p.t3 = t3;
  p.t4 = t4;
  p.n_cells = cells;
  return p;
}

void BM_ObcEigensystem(benchmark::State& state) {
  const auto p = point(4, 2, static_cast<int>(state.range(0)));
  const auto prec = state.range(1) ? gt::Precision::extended : gt::Precision::standard;
  for (auto _ : state) benchmark::DoNotOptimize(gt::obc_eigensystem(p, prec));
}
BENCHMARK(BM_ObcEigensystem)
    ->Args({10, 0})->Args({40, 0})->Args({40, 1})->Args({160, 0})
    ->Unit(benchmark::kMillisecond);

void BM_PbcBands(benchmark::State& state) {
  const auto p = point(4, 2, 40);
  for (auto _ : state) benchmark::DoNotOptimize(gt::pbc_bands(p, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_PbcBands)->Arg(256)->Arg(2048);

void BM_ComputeGbz(benchmark::State& state) {
  const auto p = point(2, 0.5, 40);
  for (auto _ : state)
    benchmark::DoNotOptimize(gt::compute_gbz(p, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_ComputeGbz)->Arg(40)->Arg(160)->Unit(benchmark::kMillisecond);

void BM_EnergyWinding(benchmark::State& state) {
  const auto p = point(2, 0.5, 40);
  for (auto _ : state) benchmark::DoNotOptimize(gt::energy_winding(p, {-3.0, 0.0}));
}
BENCHMARK(BM_EnergyWinding);

void BM_EigenmodePhase(benchmark::State& state) {
  const auto p = point(2, 4, 40);
  for (auto _ : state) benchmark::DoNotOptimize(gt::eigenmode_phase(p, 128));
}
BENCHMARK(BM_EigenmodePhase)->Unit(benchmark::kMillisecond);

void BM_SaddlePoints(benchmark::State& state) {
  const auto p = point(10, 2.5, 40);
  for (auto _ : state) benchmark::DoNotOptimize(gt::saddle_points(p));
}
BENCHMARK(BM_SaddlePoints)->Unit(benchmark::kMillisecond);

void BM_EvolveSpectral(benchmark::State& state) {
  const auto p = point(4, 2, 40);
  const auto es = gt::obc_eigensystem(p);
  const auto times = gt::uniform_times(60.0, static_cast<int>(state.range(0)));
  const auto psi0 = gt::delta_state(p.n_cells);
  for (auto _ : state) benchmark::DoNotOptimize(gt::evolve(p, es, psi0, times));
}
BENCHMARK(BM_EvolveSpectral)->Arg(201)->Unit(benchmark::kMillisecond);

void BM_EvolveStepped(benchmark::State& state) {
  const auto p = point(4, 2, 40);
  gt::EvolveOptions o;
  o.method = gt::Propagation::stepped;
  const auto times = gt::uniform_times(60.0, 201);
  const auto psi0 = gt::delta_state(p.n_cells);
  for (auto _ : state) benchmark::DoNotOptimize(gt::evolve(p, psi0, times, o));
}
BENCHMARK(BM_EvolveStepped)->Unit(benchmark::kMillisecond);

void BM_NonBlochWeights(benchmark::State& state) {
  const auto p = point(4, 2, 40);
  const auto curve = gt::compute_gbz(p, p.n_cells);
  const auto grid = gt::evolve(p, gt::delta_state(p.n_cells), gt::uniform_times(20.0, 41));
  for (auto _ : state) benchmark::DoNotOptimize(gt::nonbloch_weights(grid, curve));
}
BENCHMARK(BM_NonBlochWeights)->Unit(benchmark::kMillisecond);

void BM_GreenContour(benchmark::State& state) {
  const auto p = point(4, 2, 60);
  for (auto _ : state)
    benchmark::DoNotOptimize(gt::green_element(p, {5.0, 2.0}, 120, 121, p.n_cells));
}
BENCHMARK(BM_GreenContour);

}  // namespace

BENCHMARK_MAIN();
