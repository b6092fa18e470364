#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "fedclave/federation.hpp"
#include "fedclave/random.hpp"
#include "helpers.hpp"

using namespace fedclave;
using testing::error_code_of;

namespace {

ModelParams filled(float v) {
  ModelParams p;
  for (auto& x : p.flat()) x = v;
  return p;
}

std::vector<ClientDataset> synthetic_clients(ScenarioKind kind, std::size_t n, std::size_t per_label,
                                             std::size_t test_per_label, std::uint64_t seed) {
  const auto scenario = default_scenario(kind);
  const auto data =
      synth_dataset(seed, n * per_label, scenario.class_count() * test_per_label);
  return partition_clients(data, scenario, n, per_label, test_per_label, seed);
}

TrainConfig quick(int epochs = 2) {
  TrainConfig cfg;
  cfg.epochs = epochs;
  cfg.batch_size = 16;
  return cfg;
}

}  // namespace

TEST_CASE("weighted aggregation") {
  const auto w = init_params(1);
  ModelParams neg = w;
  for (auto& x : neg.flat()) x = -x;
  const std::vector<WeightedModel> sym{{0, &w, 5}, {1, &neg, 5}};
  const auto cancelled = aggregate_weighted(sym);
  for (const float v : cancelled.flat()) REQUIRE(v == 0.0f);

  const std::vector<WeightedModel> one{{3, &w, 2}};
  CHECK(aggregate_weighted(one) == w);

  const auto zero = filled(0), four = filled(4);
  const std::vector<WeightedModel> pair{{0, &zero, 1}, {1, &four, 3}};
  const auto mean = aggregate_weighted(pair);
  for (const float v : mean.flat()) REQUIRE(v == 3.0f);

  CHECK(error_code_of([] { aggregate_weighted({}); }) == ErrorCode::kEmptyInput);
  const std::vector<WeightedModel> zw{{0, &w, 0}, {1, &w, 0}};
  CHECK(error_code_of([&] { aggregate_weighted(zw); }) == ErrorCode::kZeroTotalWeight);
}

TEST_CASE("aggregation ignores input order") {
  const auto a = init_params(1), b = init_params(2), c = init_params(3);
  std::vector<WeightedModel> m{{0, &a, 10}, {1, &b, 7}, {2, &c, 3}};
  const auto want = aggregate_weighted(m);
  std::sort(m.begin(), m.end(), [](auto& x, auto& y) { return x.client_id > y.client_id; });
  CHECK(aggregate_weighted(m) == want);
  std::swap(m[0], m[1]);
  CHECK(aggregate_weighted(m) == want);
}

TEST_CASE("single-client FedAvg is plain local training") {
  auto clients = synthetic_clients(ScenarioKind::kIid, 1, 4, 2, 5);
  const auto cfg = quick(2);
  const int rounds = 3;
  const std::uint64_t seed = 17;
  const auto fed = run_fedavg(clients, rounds, cfg, seed);

  auto p = init_params(model_init_seed(seed, 0));
  for (int r = 0; r < rounds; ++r) {
    auto local = cfg;
    local.seed = client_round_seed(seed, r, 0);
    p = train_epochs(p, clients[0].train, local);
  }
  CHECK(fed.global == p);
}

TEST_CASE("FedAvg preconditions") {
  auto clients = synthetic_clients(ScenarioKind::kIid, 2, 1, 1, 5);
  CHECK(error_code_of([&] { run_fedavg(clients, 0, quick(), 1); }) == ErrorCode::kInvalidConfig);
  CHECK(error_code_of([&] { run_fedavg({}, 1, quick(), 1); }) == ErrorCode::kEmptyInput);
}

TEST_CASE("IID clients see near-equal accuracy") {
  auto clients = synthetic_clients(ScenarioKind::kIid, 48, 2, 20, 3);
  const auto fed = run_fedavg(clients, 3, quick(2), 3);
  REQUIRE(fed.client_accuracies.size() == 48);
  double mean = 0;
  for (const double a : fed.client_accuracies) mean += a;
  mean /= 48.0;
  double var = 0;
  for (const double a : fed.client_accuracies) var += (a - mean) * (a - mean);
  CHECK(std::sqrt(var / 48.0) * 100.0 <= 2.0);
  CHECK(fed.pooled_accuracy == doctest::Approx(mean));
}

TEST_CASE("round log reports every round") {
  auto clients = synthetic_clients(ScenarioKind::kIid, 4, 2, 2, 3);
  ExecutionOptions exec;
  std::vector<RoundLog> logs;
  exec.on_round = [&](const RoundLog& log) { logs.push_back(log); };
  run_fedavg(clients, 3, quick(1), 3, exec);
  REQUIRE(logs.size() == 3);
  for (int r = 0; r < 3; ++r) CHECK(logs[static_cast<std::size_t>(r)].round == r);
  CHECK(logs.back().mean_train_loss > 0.0);
}

TEST_CASE("FedAvg is independent of the worker count") {
  auto clients = synthetic_clients(ScenarioKind::kConceptShiftFeatures, 8, 2, 2, 4);
  ExecutionOptions serial, threaded;
  threaded.jobs = 4;
  CHECK(run_fedavg(clients, 2, quick(1), 9, serial).global ==
        run_fedavg(clients, 2, quick(1), 9, threaded).global);
}

TEST_CASE("single-class oracle is centralized training") {
  auto clients = synthetic_clients(ScenarioKind::kIid, 3, 2, 2, 8);
  auto cfg = quick(3);
  cfg.seed = 31;
  const auto oracle = run_oracle(clients, cfg);
  REQUIRE(oracle.class_models.size() == 1);

  Samples pool;
  for (const auto& c : clients) pool.append(c.train);
  auto central = cfg;
  central.seed = derive_seed(cfg.seed, Stream::kOracle, {0, 1});
  const auto want =
      train_epochs(init_params(derive_seed(cfg.seed, Stream::kOracle, {0, 0})), pool, central);
  CHECK(oracle.class_models[0] == want);
  CHECK(oracle.class_accuracies[0] == doctest::Approx(evaluate(want, clients[0].test)));
}

TEST_CASE("oracle pools partition the training data") {
  auto clients = synthetic_clients(ScenarioKind::kQuantitySkew, 8, 5, 5, 8);
  const auto oracle = run_oracle(clients, quick(1));
  std::size_t pooled = 0, total = 0;
  for (const auto n : oracle.pool_sizes) pooled += n;
  for (const auto& c : clients) total += c.train.size();
  CHECK(pooled == total);
  CHECK(oracle.pool_sizes.size() == 4);
}

TEST_CASE("oracle rejects a class without training data") {
  auto clients = synthetic_clients(ScenarioKind::kConceptShiftFeatures, 4, 1, 1, 8);
  clients[1].het_class = 0;
  CHECK(error_code_of([&] { run_oracle(clients, quick(1)); }) == ErrorCode::kEmptyClass);
}

TEST_CASE("oracle beats FedAvg under label swaps") {
  auto clients = synthetic_clients(ScenarioKind::kConceptShiftLabels, 12, 10, 10, 2);
  auto cfg = quick(5);
  const auto fed = run_fedavg(clients, 4, cfg, 2);
  cfg.epochs = 20;
  const auto oracle = run_oracle(clients, cfg);
  double mean = 0;
  for (const double a : oracle.class_accuracies) mean += a;
  mean /= static_cast<double>(oracle.class_accuracies.size());
  CHECK(mean >= fed.pooled_accuracy);
}

TEST_CASE("clients without training data keep their start model") {
  auto clients = synthetic_clients(ScenarioKind::kIid, 2, 1, 1, 8);
  clients[1].train = Samples{};
  const std::vector<ModelParams> start{init_params(1)};
  const std::vector<int> assign{0, 0};
  const auto local = train_clients(clients, start, assign, 0, quick(1), 3, {});
  CHECK(local[1] == start[0]);
  CHECK_FALSE(local[0] == start[0]);
}

TEST_CASE("memberless clusters keep their models") {
  auto clients = synthetic_clients(ScenarioKind::kIid, 2, 1, 1, 8);
  const std::vector<ModelParams> prev{init_params(1), init_params(2)};
  const std::vector<int> assign{0, 0};
  const auto local = train_clients(clients, prev, assign, 0, quick(1), 3, {});
  const auto next = aggregate_clusters(clients, local, assign, prev);
  CHECK(next[1] == prev[1]);
  const auto acc = cluster_accuracies(clients, next, assign);
  CHECK(acc[0].members == 2);
  CHECK(acc[0].accuracy.has_value());
  CHECK_FALSE(acc[1].accuracy.has_value());
}
