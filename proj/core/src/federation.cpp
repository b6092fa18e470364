#include "fedclave/federation.hpp"

#include <algorithm>

#include "fedclave/errors.hpp"
#include "fedclave/parallel.hpp"
#include "fedclave/random.hpp"

namespace fedclave {

ModelParams aggregate_weighted(std::span<const WeightedModel> models) {
  if (models.empty()) throw Error(ErrorCode::kEmptyInput, "no models to aggregate");
  std::vector<WeightedModel> ordered(models.begin(), models.end());
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const WeightedModel& a, const WeightedModel& b) {
                     return a.client_id < b.client_id;
                   });
  double total = 0.0;
  for (const auto& m : ordered) {
    if (!(m.weight >= 0.0)) {
      throw Error(ErrorCode::kZeroTotalWeight, "negative aggregation weight");
    }
    total += m.weight;
  }
  if (!(total > 0.0)) throw Error(ErrorCode::kZeroTotalWeight, "aggregation weights sum to 0");

  std::vector<double> acc(kParamCount, 0.0);
  for (const auto& m : ordered) {
    if (m.weight == 0.0) continue;
    const double w = m.weight / total;
    const auto src = m.params->flat();
    for (std::size_t i = 0; i < kParamCount; ++i) acc[i] += w * static_cast<double>(src[i]);
  }
  ModelParams out;
  auto dst = out.flat();
  for (std::size_t i = 0; i < kParamCount; ++i) dst[i] = static_cast<float>(acc[i]);
  return out;
}

std::uint64_t client_round_seed(std::uint64_t seed, int round, int client_id) {
  return derive_seed(seed, Stream::kClientTrain,
                     {static_cast<std::uint64_t>(round), static_cast<std::uint64_t>(client_id)});
}

std::uint64_t model_init_seed(std::uint64_t seed, int cluster) {
  return derive_seed(seed, Stream::kModelInit, {static_cast<std::uint64_t>(cluster)});
}

std::vector<ModelParams> train_clients(std::span<const ClientDataset> clients,
                                       std::span<const ModelParams> cluster_models,
                                       std::span<const int> assignment, int round,
                                       const TrainConfig& cfg, std::uint64_t seed,
                                       const ExecutionOptions& exec,
                                       std::vector<double>* losses) {
  std::vector<ModelParams> local(clients.size());
  std::vector<double> client_loss(clients.size(), 0.0);
  parallel_for(clients.size(), exec.jobs, [&](std::size_t i) {
    const auto& start = cluster_models[static_cast<std::size_t>(assignment[i])];
    if (clients[i].train.empty()) {
      local[i] = start;
      return;
    }
    TrainConfig local_cfg = cfg;
    local_cfg.seed = client_round_seed(seed, round, clients[i].client_id);
    TrainStats stats;
    local[i] = train_epochs(start, clients[i].train, local_cfg, &stats);
    client_loss[i] = stats.last_epoch_loss;
  });
  if (losses) *losses = std::move(client_loss);
  return local;
}

std::vector<ModelParams> aggregate_clusters(std::span<const ClientDataset> clients,
                                            std::span<const ModelParams> local_models,
                                            std::span<const int> assignment,
                                            std::span<const ModelParams> previous) {
  std::vector<ModelParams> out(previous.begin(), previous.end());
  for (std::size_t k = 0; k < previous.size(); ++k) {
    std::vector<WeightedModel> members;
    double total = 0.0;
    for (std::size_t i = 0; i < clients.size(); ++i) {
      if (assignment[i] != static_cast<int>(k)) continue;
      const auto n = static_cast<double>(clients[i].train.size());
      members.push_back({clients[i].client_id, &local_models[i], n});
      total += n;
    }
    if (members.empty() || total == 0.0) continue;
    out[k] = aggregate_weighted(members);
  }
  return out;
}

void emit_round_log(std::span<const ClientDataset> clients, std::span<const ModelParams> models,
                    std::span<const int> assignment, int round, std::span<const double> losses,
                    const ExecutionOptions& exec) {
  if (!exec.on_round) return;
  RoundLog log;
  log.round = round;
  double weight = 0.0;
  std::size_t correct = 0;
  std::size_t total = 0;
  for (std::size_t i = 0; i < clients.size(); ++i) {
    const auto n = static_cast<double>(clients[i].train.size());
    log.mean_train_loss += n * losses[i];
    weight += n;
  }
  if (weight > 0.0) log.mean_train_loss /= weight;
  for (const auto& acc : cluster_accuracies(clients, models, assignment)) {
    correct += acc.correct;
    total += acc.total;
  }
  log.test_accuracy = total ? static_cast<double>(correct) / static_cast<double>(total) : 0.0;
  exec.on_round(log);
}

std::vector<ModelParams> clustered_round(std::span<const ClientDataset> clients,
                                         std::span<const ModelParams> cluster_models,
                                         std::span<const int> assignment, int round,
                                         const TrainConfig& cfg, std::uint64_t seed,
                                         const ExecutionOptions& exec) {
  std::vector<double> losses;
  const auto local =
      train_clients(clients, cluster_models, assignment, round, cfg, seed, exec, &losses);
  auto next = aggregate_clusters(clients, local, assignment, cluster_models);
  emit_round_log(clients, next, assignment, round, losses, exec);
  return next;
}

std::vector<ClusterAccuracy> cluster_accuracies(std::span<const ClientDataset> clients,
                                                std::span<const ModelParams> cluster_models,
                                                std::span<const int> assignment) {
  std::vector<ClusterAccuracy> out(cluster_models.size());
  for (std::size_t i = 0; i < clients.size(); ++i) {
    auto& acc = out[static_cast<std::size_t>(assignment[i])];
    ++acc.members;
    acc.total += clients[i].test.size();
    if (!clients[i].test.empty()) {
      acc.correct += count_correct(cluster_models[static_cast<std::size_t>(assignment[i])],
                                   clients[i].test);
    }
  }
  for (auto& acc : out) {
    if (acc.members > 0 && acc.total > 0) {
      acc.accuracy = static_cast<double>(acc.correct) / static_cast<double>(acc.total);
    }
  }
  return out;
}

FedAvgResult run_fedavg(std::span<const ClientDataset> clients, int rounds,
                        const TrainConfig& cfg, std::uint64_t seed,
                        const ExecutionOptions& exec) {
  if (rounds < 1) throw ConfigError("rounds", "must be at least 1");
  if (clients.empty()) throw Error(ErrorCode::kEmptyInput, "no clients");
  cfg.validate();
  std::vector<ModelParams> global{init_params(model_init_seed(seed, 0))};
  const std::vector<int> assignment(clients.size(), 0);
  if (exec.on_assignment) exec.on_assignment(0, assignment);
  for (int r = 0; r < rounds; ++r) {
    global = clustered_round(clients, global, assignment, r, cfg, seed, exec);
  }

  FedAvgResult result;
  result.global = std::move(global.front());
  std::size_t correct = 0;
  std::size_t total = 0;
  for (const auto& c : clients) {
    const auto hits = c.test.empty() ? 0 : count_correct(result.global, c.test);
    result.client_accuracies.push_back(
        c.test.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(c.test.size()));
    correct += hits;
    total += c.test.size();
  }
  result.pooled_accuracy = total ? static_cast<double>(correct) / static_cast<double>(total) : 0.0;
  return result;
}

OracleResult run_oracle(std::span<const ClientDataset> clients, const TrainConfig& cfg,
                        const ExecutionOptions& exec) {
  if (clients.empty()) throw Error(ErrorCode::kEmptyInput, "no clients");
  cfg.validate();
  int max_class = 0;
  for (const auto& c : clients) max_class = std::max(max_class, c.het_class);
  const auto k = static_cast<std::size_t>(max_class) + 1;

  std::vector<Samples> train_pools(k);
  std::vector<Samples> test_pools(k);
  for (const auto& c : clients) {
    train_pools[static_cast<std::size_t>(c.het_class)].append(c.train);
    test_pools[static_cast<std::size_t>(c.het_class)].append(c.test);
  }
  for (std::size_t c = 0; c < k; ++c) {
    if (train_pools[c].empty() || test_pools[c].empty()) {
      throw Error(ErrorCode::kEmptyClass,
                  "heterogeneity class " + std::to_string(c) + " has no data");
    }
  }

  OracleResult result;
  result.class_models.resize(k);
  result.class_accuracies.resize(k);
  for (const auto& pool : train_pools) result.pool_sizes.push_back(pool.size());
  parallel_for(k, exec.jobs, [&](std::size_t c) {
    TrainConfig class_cfg = cfg;
    class_cfg.seed = derive_seed(cfg.seed, Stream::kOracle, {c, 1});
    const auto init = init_params(derive_seed(cfg.seed, Stream::kOracle, {c, 0}));
    result.class_models[c] = train_epochs(init, train_pools[c], class_cfg);
    result.class_accuracies[c] = evaluate(result.class_models[c], test_pools[c]);
  });
  return result;
}

}  // namespace fedclave
