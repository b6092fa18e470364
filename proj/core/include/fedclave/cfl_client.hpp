#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fedclave/federation.hpp"

namespace fedclave {

enum class IfcaInit {
  // Round 0 assigns every client to a uniformly random cluster.
  kRandom,
  // Round 0 uses IfcaOptions::warm_assignment (e.g. an expert's guess).
  kWarmStart,
  // Round 0 already picks the loss-minimizing cluster.
  kLossArgmin,
};

struct IfcaOptions {
  IfcaInit init = IfcaInit::kRandom;
  std::vector<int> warm_assignment;
  // Start every cluster model from the same parameters instead of distinct
  // seeds. Under the lowest-index tie rule this collapses onto cluster 0.
  bool identical_init = false;
};

// Index of the cluster model with the lowest mean training loss on the
// client's full training set; ties go to the lowest index.
int select_cluster(const ClientDataset& client, std::span<const ModelParams> cluster_models);

// Client-side clustered FL (IFCA): every round each client adopts the
// loss-minimizing cluster model, trains it locally, and the server averages
// each cluster's members. Memberless clusters keep their parameters.
// Throws ConfigError for k < 1, rounds < 1 or a malformed warm assignment.
ClusteredResult run_ifca(std::span<const ClientDataset> clients, int k, int rounds,
                         const TrainConfig& cfg, std::uint64_t seed,
                         const IfcaOptions& options = {}, const ExecutionOptions& exec = {});

}  // namespace fedclave
