// Parallel kernels against their serial btv::reference counterparts.

#include <benchmark/benchmark.h>

#include "btv/bowtie.hpp"
#include "btv/cascade.hpp"
#include "btv/community.hpp"
#include "btv/features.hpp"
#include "btv/nullmodel.hpp"
#include "btv/partition.hpp"
#include "fixtures.hpp"

using namespace btv;

namespace {

const DirectedGraph& graph() {
  static const DirectedGraph g = [] {
    Rng rng(2019);
    return btv::testing::random_graph(400, 0.01, rng);
  }();
  return g;
}

void BM_Betweenness(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(betweenness(graph()));
}
void BM_BetweennessReference(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(reference::betweenness(graph()));
}

void BM_ComponentRank(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(component_rank(graph(), 100, 7));
}
void BM_ComponentRankReference(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(reference::component_rank(graph(), 100, 7));
}

void BM_RecursiveDecompose(benchmark::State& state) {
  const auto groups = polarity_partition(graph());
  for (auto _ : state) benchmark::DoNotOptimize(recursive_decompose(graph(), groups));
}
void BM_RecursiveDecomposeReference(benchmark::State& state) {
  const auto groups = polarity_partition(graph());
  for (auto _ : state) benchmark::DoNotOptimize(reference::recursive_decompose(graph(), groups));
}

void BM_Cascades(benchmark::State& state) {
  const auto roles = decompose(graph());
  for (auto _ : state) benchmark::DoNotOptimize(component_influence_experiment(graph(), roles, 300, SirParams{}, 3));
}
void BM_CascadesReference(benchmark::State& state) {
  const auto roles = decompose(graph());
  for (auto _ : state)
    benchmark::DoNotOptimize(reference::component_influence_experiment(graph(), roles, 300, SirParams{}, 3));
}

void BM_Communities(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(detect_communities(graph(), 4, 11));
}
void BM_CommunitiesReference(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(reference::detect_communities(graph(), 4, 11));
}

}  // namespace

BENCHMARK(BM_Betweenness)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BetweennessReference)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ComponentRank)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ComponentRankReference)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RecursiveDecompose)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RecursiveDecomposeReference)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Cascades)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CascadesReference)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Communities)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CommunitiesReference)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
