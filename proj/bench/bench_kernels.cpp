// Serial reference vs OpenMP kernels. Run with OMP_NUM_THREADS set to vary
// the thread count; on one core the pairs should cost about the same.
#include <benchmark/benchmark.h>

#include "fragpart/exact.hpp"
#include "fragpart/mcg.hpp"

using namespace fragpart;

namespace {

void exact_serial(benchmark::State& state) {
  const int a0 = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(exact_statistics_serial(a0, WeightModel::uniform()).mean_multiplicity);
  state.SetItemsProcessed(state.iterations() * static_cast<long>(CountTable(a0).count(a0).get_ui()));
}

void exact_parallel(benchmark::State& state) {
  const int a0 = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(exact_statistics(a0, WeightModel::uniform()).mean_multiplicity);
  state.SetItemsProcessed(state.iterations() * static_cast<long>(CountTable(a0).count(a0).get_ui()));
}

ChainConfig chain_config() {
  ChainConfig cfg;
  cfg.seed = 1;
  cfg.burn_in = 10000;
  cfg.samples = 200000;
  cfg.thinning = 5;
  return cfg;
}

void chain_single(benchmark::State& state) {
  const auto cfg = chain_config();
  for (auto _ : state)
    benchmark::DoNotOptimize(run_chain(100, WeightModel::uniform(), cfg, SummaryStatistics(100)).mean_multiplicity());
  state.SetItemsProcessed(state.iterations() * static_cast<long>(cfg.samples * cfg.thinning));
}

void chain_parallel(benchmark::State& state) {
  const auto cfg = chain_config();
  const int chains = static_cast<int>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(run_chains(100, WeightModel::uniform(), cfg, chains).mean_multiplicity());
  state.SetItemsProcessed(state.iterations() * static_cast<long>(cfg.samples * cfg.thinning));
}

}  // namespace

BENCHMARK(exact_serial)->Arg(50)->Arg(70)->Unit(benchmark::kMillisecond);
BENCHMARK(exact_parallel)->Arg(50)->Arg(70)->Unit(benchmark::kMillisecond);
BENCHMARK(chain_single)->Unit(benchmark::kMillisecond);
BENCHMARK(chain_parallel)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
