#include <benchmark/benchmark.h>

#include "dyson/exact.hpp"
#include "dyson/mc.hpp"
#include "dyson/tail_sum.hpp"

using namespace dyson;

namespace {

void BM_TailSum(benchmark::State& state) {
  const auto a = state.range(0);
  for (auto _ : state) benchmark::DoNotOptimize(tail_sum_certified(1.5, a));
}
BENCHMARK(BM_TailSum)->Arg(1)->Arg(1000)->Arg(1000000)->Arg(1000000000);

void BM_Enumerate(benchmark::State& state) {
  const ModelSpec model(CouplingLaw(1.0, 1.5), FieldLaw::decaying(0.1, 1.0), 1.0);
  const PreparedSystem sys = prepare_system(Volume::centered(state.range(0)), BoundaryCondition::plus(), model);
  const auto workers = static_cast<unsigned>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(enumerate(sys, ExactOptions{false, workers}).log_partition);
  state.SetItemsProcessed(state.iterations() * (std::int64_t{1} << state.range(0)));
}
BENCHMARK(BM_Enumerate)->Args({12, 1})->Args({16, 1})->Args({20, 1})->Args({20, 4})->Unit(benchmark::kMillisecond)->UseRealTime();

McSystem chain_system(std::int64_t size, double beta) {
  return McSystem(Volume::centered(size), BoundaryCondition::plus(), ModelSpec(CouplingLaw(1.0, 1.5), FieldLaw::zero(), beta));
}

void BM_MetropolisSweep(benchmark::State& state) {
  const McSystem sys = chain_system(state.range(0), 0.3);
  ChainState chain(sys, SpinConfig::uniform(sys.volume(), 1), 1);
  for (auto _ : state) benchmark::DoNotOptimize(metropolis_sweep(chain, sys));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MetropolisSweep)->Arg(64)->Arg(256)->Arg(1024);

void BM_ClusterUpdate(benchmark::State& state) {
  const McSystem sys = chain_system(state.range(0), 0.6);
  ChainState chain(sys, SpinConfig::uniform(sys.volume(), 1), 1);
  std::int64_t sites = 0;
  for (auto _ : state) sites += static_cast<std::int64_t>(cluster_update(chain, sys).size);
  state.SetItemsProcessed(sites);
}
BENCHMARK(BM_ClusterUpdate)->Arg(64)->Arg(256)->Arg(1024);

}  // namespace
BENCHMARK_MAIN();
