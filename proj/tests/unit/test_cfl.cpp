#include <doctest.h>

#include "fedclave/cfl_client.hpp"
#include "fedclave/cfl_server.hpp"
#include "fedclave/clustering_metrics.hpp"
#include "helpers.hpp"

using namespace fedclave;
using testing::error_code_of;

namespace {

std::vector<ClientDataset> synthetic_clients(ScenarioKind kind, std::size_t n, std::size_t per_label,
                                             std::size_t test_per_label, std::uint64_t seed) {
  const auto scenario = default_scenario(kind);
  const auto data =
      synth_dataset(seed, n * per_label, scenario.class_count() * test_per_label);
  return partition_clients(data, scenario, n, per_label, test_per_label, seed);
}

TrainConfig quick(int epochs) {
  TrainConfig cfg;
  cfg.epochs = epochs;
  cfg.batch_size = 16;
  return cfg;
}

std::vector<int> truth_of(const std::vector<ClientDataset>& clients) {
  std::vector<int> t;
  for (const auto& c : clients) t.push_back(c.het_class);
  return t;
}

struct Trace {
  std::vector<RoundLog> rounds;
  ExecutionOptions exec() {
    ExecutionOptions e;
    e.on_round = [this](const RoundLog& log) { rounds.push_back(log); };
    return e;
  }
};

}  // namespace

TEST_CASE("server CFL with k = 1 follows FedAvg") {
  auto clients = synthetic_clients(ScenarioKind::kConceptShiftFeatures, 8, 3, 2, 1);
  const auto cfg = quick(1);
  Trace fed_trace, srv_trace;
  const auto fed = run_fedavg(clients, 4, cfg, 7, fed_trace.exec());
  ServerCflOptions opts;
  opts.warmup_rounds = 2;
  const auto srv = run_server_cfl(clients, 1, 4, cfg, 7, opts, srv_trace.exec());
  CHECK(srv.cluster_models[0] == fed.global);
  REQUIRE(srv_trace.rounds.size() == fed_trace.rounds.size());
  for (std::size_t r = 0; r < fed_trace.rounds.size(); ++r) {
    CHECK(srv_trace.rounds[r].mean_train_loss == fed_trace.rounds[r].mean_train_loss);
  }
}

TEST_CASE("server CFL separates rotations") {
  auto clients = synthetic_clients(ScenarioKind::kConceptShiftFeatures, 8, 10, 5, 2);
  ServerCflOptions opts;
  opts.warmup_rounds = 2;
  Trace trace;
  const auto r = run_server_cfl(clients, 4, 4, quick(3), 2, opts, trace.exec());
  CHECK(adjusted_rand_index(truth_of(clients), r.assignment) == 1.0);
  CHECK(trace.rounds.size() == 4);
  CHECK(r.accuracies.size() == 4);
}

TEST_CASE("server CFL preconditions") {
  auto clients = synthetic_clients(ScenarioKind::kIid, 4, 1, 1, 2);
  ServerCflOptions opts;
  opts.warmup_rounds = 3;
  CHECK_THROWS_AS(run_server_cfl(clients, 2, 3, quick(1), 1, opts), ConfigError);
  opts.warmup_rounds = 0;
  CHECK_THROWS_AS(run_server_cfl(clients, 2, 3, quick(1), 1, opts), ConfigError);
  opts.warmup_rounds = 1;
  CHECK_THROWS_AS(run_server_cfl(clients, 5, 3, quick(1), 1, opts), ConfigError);
}

TEST_CASE("IFCA with k = 1 follows FedAvg") {
  auto clients = synthetic_clients(ScenarioKind::kConceptShiftLabels, 6, 3, 2, 1);
  const auto cfg = quick(1);
  Trace fed_trace, ifca_trace;
  const auto fed = run_fedavg(clients, 3, cfg, 5, fed_trace.exec());
  const auto ifca = run_ifca(clients, 1, 3, cfg, 5, {}, ifca_trace.exec());
  CHECK(ifca.cluster_models[0] == fed.global);
  REQUIRE(ifca_trace.rounds.size() == 3);
  for (std::size_t r = 0; r < 3; ++r) {
    CHECK(ifca_trace.rounds[r].mean_train_loss == fed_trace.rounds[r].mean_train_loss);
    CHECK(ifca_trace.rounds[r].test_accuracy == fed_trace.rounds[r].test_accuracy);
  }
}

TEST_CASE("cluster selection") {
  auto clients = synthetic_clients(ScenarioKind::kIid, 1, 5, 1, 3);
  const auto& client = clients[0];
  const std::vector<ModelParams> one{init_params(1)};
  CHECK(select_cluster(client, one) == 0);

  const auto trained = train_epochs(init_params(1), client.train, quick(10));
  const std::vector<ModelParams> two{init_params(1), trained};
  CHECK(select_cluster(client, two) == 1);
  const std::vector<ModelParams> same{trained, trained, trained};
  CHECK(select_cluster(client, same) == 0);

  ClientDataset empty = client;
  empty.train = Samples{};
  CHECK(select_cluster(empty, two) == 0);
}

TEST_CASE("identical IFCA models keep every IID client in cluster 0") {
  auto clients = synthetic_clients(ScenarioKind::kIid, 4, 2, 1, 3);
  IfcaOptions opts;
  opts.init = IfcaInit::kLossArgmin;
  opts.identical_init = true;
  std::vector<std::vector<int>> seen;
  ExecutionOptions exec;
  exec.on_assignment = [&](int, std::span<const int> a) { seen.emplace_back(a.begin(), a.end()); };
  const auto r = run_ifca(clients, 2, 3, quick(1), 4, opts, exec);
  REQUIRE(seen.size() == 3);
  for (const auto& a : seen) {
    for (int c : a) CHECK(c == 0);
  }
  CHECK(r.cluster_models[1] == init_params(model_init_seed(4, 0)));
  CHECK_FALSE(r.accuracies[1].accuracy.has_value());
}

TEST_CASE("warm-started IFCA clusters at least as well as random init") {
  auto clients = synthetic_clients(ScenarioKind::kConceptShiftFeatures, 8, 10, 5, 6);
  const auto truth = truth_of(clients);
  const auto cfg = quick(2);
  const auto random = run_ifca(clients, 4, 4, cfg, 6);
  IfcaOptions warm;
  warm.init = IfcaInit::kWarmStart;
  warm.warm_assignment = truth;
  const auto warmed = run_ifca(clients, 4, 4, cfg, 6, warm);
  CHECK(adjusted_rand_index(truth, warmed.assignment) >=
        adjusted_rand_index(truth, random.assignment));
}

TEST_CASE("IFCA preconditions") {
  auto clients = synthetic_clients(ScenarioKind::kIid, 2, 1, 1, 3);
  CHECK_THROWS_AS(run_ifca(clients, 0, 2, quick(1), 1), ConfigError);
  CHECK_THROWS_AS(run_ifca(clients, 2, 0, quick(1), 1), ConfigError);
  IfcaOptions warm;
  warm.init = IfcaInit::kWarmStart;
  warm.warm_assignment = {0};
  CHECK_THROWS_AS(run_ifca(clients, 2, 1, quick(1), 1, warm), ConfigError);
  warm.warm_assignment = {0, 2};
  CHECK_THROWS_AS(run_ifca(clients, 2, 1, quick(1), 1, warm), ConfigError);
}

TEST_CASE("IFCA is independent of the worker count") {
  auto clients = synthetic_clients(ScenarioKind::kConceptShiftLabels, 6, 2, 2, 3);
  ExecutionOptions threaded;
  threaded.jobs = 3;
  const auto a = run_ifca(clients, 3, 2, quick(1), 8);
  const auto b = run_ifca(clients, 3, 2, quick(1), 8, {}, threaded);
  CHECK(a.assignment == b.assignment);
  CHECK(a.cluster_models == b.cluster_models);
}
