#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "fedclave/clustering_metrics.hpp"

namespace {

std::vector<int> labels(std::size_t n, int k, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(0, k - 1);
  std::vector<int> out(n);
  for (auto& v : out) v = pick(rng);
  return out;
}

void BM_ClusteringMetrics(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto truth = labels(n, 4, 1);
  const auto pred = labels(n, 4, 2);
  for (auto _ : state) {
    auto r = fedclave::clustering_metrics(truth, pred);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_ClusteringMetrics)->Arg(48)->Arg(1000)->Arg(100000);

}  // namespace
