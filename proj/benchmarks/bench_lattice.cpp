#include <benchmark/benchmark.h>

#include <random>

#include "spde/lattice.hpp"
#include "spde/mollify.hpp"

using namespace spde;

namespace {

ScalarField noisy_field(const GridSpec& g, std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  ScalarField out(g);
  for (double& x : out.values) x = 2.0 * (static_cast<double>(eng() >> 11) * 0x1.0p-53) - 1.0;
  return out;
}

}  // namespace

static void LpNormPow(benchmark::State& state) {
  const GridSpec g(1, static_cast<int>(state.range(0)), 1.0);
  const ScalarField u = noisy_field(g, 1);
  for (auto _ : state) benchmark::DoNotOptimize(lp_norm_pow(u, 4.0));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(LpNormPow)->RangeMultiplier(4)->Range(64, 4096)->Complexity();

static void Inner(benchmark::State& state) {
  const GridSpec g(1, static_cast<int>(state.range(0)), 1.0);
  const ScalarField u = noisy_field(g, 1);
  const ScalarField v = noisy_field(g, 2);
  for (auto _ : state) benchmark::DoNotOptimize(inner(u, v));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(Inner)->RangeMultiplier(4)->Range(64, 4096)->Complexity();

static void Gradient2D(benchmark::State& state) {
  const GridSpec g(2, static_cast<int>(state.range(0)), 1.0);
  const ScalarField u = noisy_field(g, 3);
  for (auto _ : state) benchmark::DoNotOptimize(grad(u));
  state.SetComplexityN(state.range(0) * state.range(0));
}
BENCHMARK(Gradient2D)->RangeMultiplier(2)->Range(16, 128)->Complexity();

static void MollifyConvolution(benchmark::State& state) {
  const GridSpec g(1, static_cast<int>(state.range(0)), 1.0);
  const MollifierKernel k = make_kernel(g, 1.0 / 8.0);
  const ScalarField u = noisy_field(g, 4);
  for (auto _ : state) benchmark::DoNotOptimize(mollify(u, k));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(MollifyConvolution)->RangeMultiplier(2)->Range(64, 512)->Complexity();

BENCHMARK_MAIN();
