#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fedclave/cfl_client.hpp"
#include "fedclave/cfl_server.hpp"
#include "fedclave/clustering_metrics.hpp"
#include "fedclave/data_ingest.hpp"
#include "fedclave/federation.hpp"
#include "fedclave/heterogeneity.hpp"

namespace fedclave {

enum class Regime { kFl, kOracle, kClient, kServer };

std::string_view regime_name(Regime regime);      // fl | oracle | client | server
std::string_view regime_row_label(Regime regime);  // FL | oracle | client | server
Regime parse_regime(std::string_view name);        // throws ConfigError("regime")

std::string_view init_mode_name(IfcaInit mode);
IfcaInit parse_init_mode(std::string_view name);  // throws ConfigError("init_mode")

struct ExperimentConfig {
  std::string dataset = "mnist";
  ScenarioKind scenario = ScenarioKind::kIid;
  Regime regime = Regime::kFl;
  int n_clients = 48;
  int per_label = 100;
  int test_per_label = 20;
  std::optional<int> k;  // defaults to the scenario's class count
  int rounds = 20;
  int epochs = 10;
  int oracle_epochs = 50;
  double lr = 0.01;
  int batch_size = 64;
  int warmup_rounds = 5;
  std::uint64_t seed = 42;
  int repeats = 1;
  double scale = 1.0;
  double retain = 0.001;
  IfcaInit init_mode = IfcaInit::kRandom;
  std::filesystem::path data_root;
  int jobs = 1;

  HeterogeneityScenario scenario_params() const;
  int class_count() const;
  int effective_k() const;
  // Applies `scale` to n_clients (kept a multiple of K), per_label, rounds
  // and warmup_rounds; the result has scale == 1.
  ExperimentConfig scaled() const;
  // Throws ConfigError naming the first invalid field.
  void validate() const;
};

struct ExperimentResult {
  ExperimentConfig config;  // effective (scaled) configuration
  std::string seed_label;   // decimal seed, or "pooled" for a summary row
  double accuracy_mean = 0.0;  // percent
  double accuracy_std = 0.0;   // percent, population std across clusters
  std::optional<MetricsReport> metrics;
  std::vector<double> group_accuracies;  // per non-empty cluster / class, fraction
  std::vector<int> truth;       // het_class per client
  std::vector<int> assignment;  // cluster per client (CFL regimes)
};

// Loads cfg.dataset from cfg.data_root, or generates the synthetic set sized
// for the (scaled) configuration.
RawDataset load_source(const ExperimentConfig& cfg);

// Unweighted mean and population standard deviation, both x100.
std::pair<double, double> aggregate_accuracy(std::span<const double> fractions);

ExperimentResult run_experiment(const ExperimentConfig& cfg);
ExperimentResult run_experiment(const ExperimentConfig& cfg, const RawDataset& data,
                                const ExecutionOptions& exec = {});

// One row per repeat (seed, seed + 1, ...) followed by a pooled summary row
// when cfg.repeats > 1.
std::vector<ExperimentResult> run_repeats(const ExperimentConfig& cfg, const RawDataset& data,
                                          const ExecutionOptions& exec = {});

struct SweepPoint {
  int k = 0;
  double accuracy_mean = 0.0;
  ExperimentResult result;
};

// Server-side runs at each k with a shared seed.
// Throws ConfigError("k") on an empty list.
std::vector<SweepPoint> cluster_sweep(const ExperimentConfig& cfg, std::span<const int> k_values,
                                      const RawDataset& data, const ExecutionOptions& exec = {});

}  // namespace fedclave
