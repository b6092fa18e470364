#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "fedclave/kmeans.hpp"

namespace {

// 48 points on four well separated blobs; dim mirrors a slice of the
// flattened weight vectors the server clusters.
std::vector<fedclave::Point> blobs(std::size_t dim) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> noise(0.0, 0.05);
  std::vector<fedclave::Point> pts;
  for (int i = 0; i < 48; ++i) {
    fedclave::Point p(dim);
    for (std::size_t d = 0; d < dim; ++d) p[d] = static_cast<double>(i % 4) + noise(rng);
    pts.push_back(std::move(p));
  }
  return pts;
}

void BM_KMeans(benchmark::State& state) {
  const auto pts = blobs(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    auto r = fedclave::kmeans(pts, 4, 11);
    benchmark::DoNotOptimize(r.inertia);
  }
}
BENCHMARK(BM_KMeans)->Arg(16)->Arg(1024)->Arg(159010)->Unit(benchmark::kMillisecond);

}  // namespace
