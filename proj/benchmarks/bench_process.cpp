#include <benchmark/benchmark.h>

#include "spde/scenario.hpp"

using namespace spde;

static void IntegrateConstNoise(benchmark::State& state) {
  const ScenarioSpec spec = with_steps(reference_scenario("const-noise-p4"),
                                       static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(run_scenario(spec, 0));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(IntegrateConstNoise)->RangeMultiplier(4)->Range(256, 4096);

static void IntegrateHeatFeedback(benchmark::State& state) {
  const ScenarioSpec spec = reference_scenario("heat-feedback");
  for (auto _ : state) benchmark::DoNotOptimize(run_scenario(spec, 0));
  state.SetItemsProcessed(state.iterations() * spec.tg.M);
}
BENCHMARK(IntegrateHeatFeedback);

static void ItoReportConstNoise(benchmark::State& state) {
  const ScenarioSpec spec = reference_scenario("const-noise-p4");
  const PathSample s = run_scenario(spec, 0);
  for (auto _ : state)
    benchmark::DoNotOptimize(ito_residual(s.path, s.noise, spec.p, spec.tau));
  state.SetItemsProcessed(state.iterations() * spec.tg.M);
}
BENCHMARK(ItoReportConstNoise);

static void WeakFormResidual(benchmark::State& state) {
  const ScenarioSpec spec = reference_scenario("const-noise-p4");
  const PathSample s = run_scenario(spec, 0);
  const ScalarField phi = bump_test_function(spec.grid, {0.5}, 0.25);
  for (auto _ : state) benchmark::DoNotOptimize(weak_form_residual(s.path, s.noise, phi));
  state.SetItemsProcessed(state.iterations() * spec.tg.M);
}
BENCHMARK(WeakFormResidual);

BENCHMARK_MAIN();
