#include "fedclave/cfl_server.hpp"

#include "fedclave/errors.hpp"
#include "fedclave/random.hpp"

namespace fedclave {

ClusteredResult run_server_cfl(std::span<const ClientDataset> clients, int k, int rounds,
                               const TrainConfig& cfg, std::uint64_t seed,
                               const ServerCflOptions& options, const ExecutionOptions& exec) {
  const int warmup = options.warmup_rounds;
  if (warmup < 1 || warmup >= rounds) {
    throw ConfigError("warmup_rounds", "must satisfy 1 <= warmup_rounds < rounds");
  }
  if (k < 1 || static_cast<std::size_t>(k) > clients.size()) {
    throw ConfigError("k", "must satisfy 1 <= k <= number of clients");
  }
  cfg.validate();

  std::vector<ModelParams> global{init_params(model_init_seed(seed, 0))};
  std::vector<int> assignment(clients.size(), 0);
  if (exec.on_assignment) exec.on_assignment(0, assignment);
  for (int r = 0; r < warmup; ++r) {
    global = clustered_round(clients, global, assignment, r, cfg, seed, exec);
  }

  std::vector<double> losses;
  const auto local =
      train_clients(clients, global, assignment, warmup, cfg, seed, exec, &losses);
  std::vector<Point> points;
  points.reserve(local.size());
  for (const auto& m : local) {
    const auto flat = m.flat();
    points.emplace_back(flat.begin(), flat.end());
  }
  const auto clusters =
      kmeans(points, k, derive_seed(seed, Stream::kKMeans), options.kmeans);
  assignment = clusters.assignment;
  if (exec.on_assignment) exec.on_assignment(warmup, assignment);

  // Memberless clusters (possible only if k-means repair fails) keep the
  // global model and are reported without an accuracy.
  std::vector<ModelParams> models(static_cast<std::size_t>(k), global.front());
  models = aggregate_clusters(clients, local, assignment, models);
  emit_round_log(clients, models, assignment, warmup, losses, exec);

  for (int r = warmup + 1; r < rounds; ++r) {
    models = clustered_round(clients, models, assignment, r, cfg, seed, exec);
  }

  ClusteredResult result;
  result.accuracies = cluster_accuracies(clients, models, assignment);
  result.cluster_models = std::move(models);
  result.assignment = std::move(assignment);
  return result;
}

}  // namespace fedclave
