#include "fedclave/cfl_client.hpp"

#include "fedclave/errors.hpp"
#include "fedclave/parallel.hpp"
#include "fedclave/random.hpp"

namespace fedclave {

int select_cluster(const ClientDataset& client, std::span<const ModelParams> cluster_models) {
  if (cluster_models.size() <= 1 || client.train.empty()) return 0;
  int best = 0;
  double best_loss = mean_loss(cluster_models[0], client.train);
  for (std::size_t k = 1; k < cluster_models.size(); ++k) {
    const double loss = mean_loss(cluster_models[k], client.train);
    if (loss < best_loss) {
      best_loss = loss;
      best = static_cast<int>(k);
    }
  }
  return best;
}

namespace {

std::vector<int> initial_assignment(std::span<const ClientDataset> clients, int k,
                                    std::uint64_t seed, const IfcaOptions& options,
                                    std::span<const ModelParams> models,
                                    const ExecutionOptions& exec) {
  std::vector<int> assignment(clients.size(), 0);
  switch (options.init) {
    case IfcaInit::kRandom:
      for (std::size_t i = 0; i < clients.size(); ++i) {
        Rng rng(derive_seed(seed, Stream::kIfcaAssign,
                            {static_cast<std::uint64_t>(clients[i].client_id)}));
        assignment[i] = static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(k)));
      }
      break;
    case IfcaInit::kWarmStart:
      if (options.warm_assignment.size() != clients.size()) {
        throw ConfigError("init_mode", "warm-start assignment must cover every client");
      }
      for (const int c : options.warm_assignment) {
        if (c < 0 || c >= k) throw ConfigError("init_mode", "warm-start cluster id out of range");
      }
      assignment = options.warm_assignment;
      break;
    case IfcaInit::kLossArgmin:
      parallel_for(clients.size(), exec.jobs,
                   [&](std::size_t i) { assignment[i] = select_cluster(clients[i], models); });
      break;
  }
  return assignment;
}

}  // namespace

ClusteredResult run_ifca(std::span<const ClientDataset> clients, int k, int rounds,
                         const TrainConfig& cfg, std::uint64_t seed, const IfcaOptions& options,
                         const ExecutionOptions& exec) {
  if (k < 1) throw ConfigError("k", "must be at least 1");
  if (rounds < 1) throw ConfigError("rounds", "must be at least 1");
  if (clients.empty()) throw Error(ErrorCode::kEmptyInput, "no clients");
  cfg.validate();

  std::vector<ModelParams> models;
  models.reserve(static_cast<std::size_t>(k));
  for (int c = 0; c < k; ++c) {
    models.push_back(init_params(model_init_seed(seed, options.identical_init ? 0 : c)));
  }

  std::vector<int> assignment = initial_assignment(clients, k, seed, options, models, exec);
  for (int r = 0; r < rounds; ++r) {
    if (r > 0) {
      parallel_for(clients.size(), exec.jobs,
                   [&](std::size_t i) { assignment[i] = select_cluster(clients[i], models); });
    }
    if (exec.on_assignment) exec.on_assignment(r, assignment);
    models = clustered_round(clients, models, assignment, r, cfg, seed, exec);
  }

  ClusteredResult result;
  result.accuracies = cluster_accuracies(clients, models, assignment);
  result.cluster_models = std::move(models);
  result.assignment = std::move(assignment);
  return result;
}

}  // namespace fedclave
