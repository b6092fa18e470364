#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "fedclave/heterogeneity.hpp"
#include "fedclave/model.hpp"

namespace fedclave {

struct WeightedModel {
  int client_id = 0;
  const ModelParams* params = nullptr;
  double weight = 0.0;  // n_i
};

// Coordinate-wise mean with weights n_i / sum(n_j). Inputs are summed in
// ascending client_id order, so any permutation of `models` gives the same
// bits. Throws Error{kEmptyInput | kZeroTotalWeight}.
ModelParams aggregate_weighted(std::span<const WeightedModel> models);

struct RoundLog {
  int round = 0;
  double mean_train_loss = 0.0;  // sample-weighted over clients
  double test_accuracy = 0.0;    // current model(s) on the pooled member tests
};

struct ExecutionOptions {
  int jobs = 1;
  // Called after every aggregation when set.
  std::function<void(const RoundLog&)> on_round;
  // Called with (round, assignment) whenever clients are (re)assigned.
  std::function<void(int, std::span<const int>)> on_assignment;
};

// Seed for client `client_id`'s local training in `round` (0-based). All
// regimes use this, which keeps their k = 1 trajectories aligned.
std::uint64_t client_round_seed(std::uint64_t seed, int round, int client_id);

// Initialization seed of cluster model `cluster`; the FedAvg global model
// uses cluster 0.
std::uint64_t model_init_seed(std::uint64_t seed, int cluster);

// Local training of every client from the model of its assigned cluster.
// Returns one model per client and writes the last-epoch losses.
std::vector<ModelParams> train_clients(std::span<const ClientDataset> clients,
                                       std::span<const ModelParams> cluster_models,
                                       std::span<const int> assignment, int round,
                                       const TrainConfig& cfg, std::uint64_t seed,
                                       const ExecutionOptions& exec,
                                       std::vector<double>* losses = nullptr);

// Sample-weighted aggregate of each cluster's members. Clusters without
// members keep `previous[k]` unchanged.
std::vector<ModelParams> aggregate_clusters(std::span<const ClientDataset> clients,
                                            std::span<const ModelParams> local_models,
                                            std::span<const int> assignment,
                                            std::span<const ModelParams> previous);

// Invokes exec.on_round (when set) with the weighted training loss and the
// pooled test accuracy of `models` under `assignment`.
void emit_round_log(std::span<const ClientDataset> clients, std::span<const ModelParams> models,
                    std::span<const int> assignment, int round, std::span<const double> losses,
                    const ExecutionOptions& exec);

// One federated round for any number of clusters (FedAvg is k = 1).
std::vector<ModelParams> clustered_round(std::span<const ClientDataset> clients,
                                         std::span<const ModelParams> cluster_models,
                                         std::span<const int> assignment, int round,
                                         const TrainConfig& cfg, std::uint64_t seed,
                                         const ExecutionOptions& exec);

struct ClusterAccuracy {
  std::size_t members = 0;
  std::size_t correct = 0;
  std::size_t total = 0;
  // Accuracy of the cluster model on the union of its members' test sets;
  // empty for memberless clusters.
  std::optional<double> accuracy;
};

std::vector<ClusterAccuracy> cluster_accuracies(std::span<const ClientDataset> clients,
                                                std::span<const ModelParams> cluster_models,
                                                std::span<const int> assignment);

struct ClusteredResult {
  std::vector<ModelParams> cluster_models;
  std::vector<int> assignment;  // per client, aligned with the input order
  std::vector<ClusterAccuracy> accuracies;
};

struct FedAvgResult {
  ModelParams global;
  std::vector<double> client_accuracies;  // global model on each client's test set
  double pooled_accuracy = 0.0;           // global model on all test sets together
};

// Throws ConfigError("rounds") when rounds < 1.
FedAvgResult run_fedavg(std::span<const ClientDataset> clients, int rounds,
                        const TrainConfig& cfg, std::uint64_t seed,
                        const ExecutionOptions& exec = {});

struct OracleResult {
  std::vector<ModelParams> class_models;
  std::vector<double> class_accuracies;
  std::vector<std::size_t> pool_sizes;
};

// One centralized model per heterogeneity class trained for cfg.epochs on
// the pooled member data; initialization and shuffling derive from cfg.seed.
// Throws Error{kEmptyClass} when a class id in [0, max het_class] has no
// clients or no training data.
OracleResult run_oracle(std::span<const ClientDataset> clients, const TrainConfig& cfg,
                        const ExecutionOptions& exec = {});

}  // namespace fedclave
