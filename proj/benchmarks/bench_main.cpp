#include <benchmark/benchmark.h>

#include "livsic/cohomology.hpp"
#include "livsic/inducing.hpp"
#include "livsic/numerics.hpp"
#include "livsic/transfer.hpp"

using namespace livsic;

static void BM_OrbitLoop(benchmark::State& state) {
  const auto t = lsv_map(0.25);
  const auto f = log_derivative(t);
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(birkhoff_sum(t, f, 0.3, n));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_OrbitLoop)->Arg(1 << 12)->Arg(1 << 16);

static void BM_UlamAssembly(benchmark::State& state) {
  const auto t = lsv_map(0.5);
  for (auto _ : state) benchmark::DoNotOptimize(ulam_matrix(t, static_cast<std::size_t>(state.range(0))));
}
BENCHMARK(BM_UlamAssembly)->Arg(1024)->Arg(4096)->Arg(16384)->Unit(benchmark::kMillisecond);

static void BM_PowerIteration(benchmark::State& state) {
  const UlamOperator op = ulam_matrix(lsv_map(0.25), static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(invariant_density(op));
}
BENCHMARK(BM_PowerIteration)->Arg(1024)->Arg(4096)->Unit(benchmark::kMillisecond);

static void BM_Induce(benchmark::State& state) {
  const auto t = lsv_map(0.5);
  for (auto _ : state) benchmark::DoNotOptimize(induce(t, Interval::left_open(0.5, 1.0), 10000));
}
BENCHMARK(BM_Induce)->Unit(benchmark::kMillisecond);

static void BM_Obstructions(benchmark::State& state) {
  const auto t = lsv_map(0.5);
  const auto f = coboundary_of(t, corpus_function("g1"));
  for (auto _ : state) benchmark::DoNotOptimize(livsic_obstructions(t, f, static_cast<std::size_t>(state.range(0)), 1e-7));
}
BENCHMARK(BM_Obstructions)->Arg(8)->Arg(12)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
