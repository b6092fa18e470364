#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "fedclave/federation.hpp"
#include "fedclave/kmeans.hpp"

namespace fedclave {

struct ServerCflOptions {
  int warmup_rounds = 5;
  KMeansOptions kmeans;
};

// Server-side clustered FL with a one-shot k-means step:
//   rounds [0, warmup)   global FedAvg from the shared initialization;
//   round  warmup        every client trains from the global model, k-means
//                        groups the resulting weight vectors, and each
//                        cluster starts from its members' weighted mean;
//   rounds (warmup, R)   independent FedAvg inside each cluster.
// The clustering round is part of the R-round budget, so k = 1 follows the
// run_fedavg trajectory bit for bit.
// Throws ConfigError unless 1 <= warmup < rounds and 1 <= k <= #clients.
ClusteredResult run_server_cfl(std::span<const ClientDataset> clients, int k, int rounds,
                               const TrainConfig& cfg, std::uint64_t seed,
                               const ServerCflOptions& options = {},
                               const ExecutionOptions& exec = {});

}  // namespace fedclave
