#include <benchmark/benchmark.h>

#include <numeric>
#include <vector>

#include "fedclave/data_ingest.hpp"
#include "fedclave/model.hpp"

namespace {

const fedclave::RawDataset& glyphs() {
  static const fedclave::RawDataset data = fedclave::synth_dataset(7, 100, 10);
  return data;
}

void BM_ForwardLossGrad(benchmark::State& state) {
  const auto& train = glyphs().train;
  const auto params = fedclave::init_params(1);
  std::vector<std::size_t> batch(static_cast<std::size_t>(state.range(0)));
  std::iota(batch.begin(), batch.end(), std::size_t{0});
  for (auto _ : state) {
    auto out = fedclave::forward_loss_grad(params, train, batch);
    benchmark::DoNotOptimize(out.loss);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ForwardLossGrad)->Arg(1)->Arg(64)->Arg(256);

void BM_TrainEpoch(benchmark::State& state) {
  const auto& train = glyphs().train;
  const auto params = fedclave::init_params(1);
  fedclave::TrainConfig cfg;
  cfg.epochs = 1;
  for (auto _ : state) {
    auto out = fedclave::train_epochs(params, train, cfg);
    benchmark::DoNotOptimize(out.flat().data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(train.size()));
}
BENCHMARK(BM_TrainEpoch)->Unit(benchmark::kMillisecond);

void BM_Evaluate(benchmark::State& state) {
  const auto& test = glyphs().test;
  const auto params = fedclave::init_params(1);
  for (auto _ : state) benchmark::DoNotOptimize(fedclave::evaluate(params, test));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(test.size()));
}
BENCHMARK(BM_Evaluate);

}  // namespace
