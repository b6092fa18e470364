#include "fedclave/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fedclave/errors.hpp"
#include "fedclave/random.hpp"

namespace fedclave {

std::string_view regime_name(Regime regime) {
  switch (regime) {
    case Regime::kFl: return "fl";
    case Regime::kOracle: return "oracle";
    case Regime::kClient: return "client";
    case Regime::kServer: return "server";
  }
  return "unknown";
}

std::string_view regime_row_label(Regime regime) {
  return regime == Regime::kFl ? "FL" : regime_name(regime);
}

Regime parse_regime(std::string_view name) {
  for (const auto r : {Regime::kFl, Regime::kOracle, Regime::kClient, Regime::kServer}) {
    if (name == regime_name(r)) return r;
  }
  throw ConfigError("regime", "unknown regime '" + std::string(name) +
                                  "' (expected fl, oracle, client or server)");
}

std::string_view init_mode_name(IfcaInit mode) {
  switch (mode) {
    case IfcaInit::kRandom: return "random";
    case IfcaInit::kWarmStart: return "warm-start";
    case IfcaInit::kLossArgmin: return "loss";
  }
  return "unknown";
}

IfcaInit parse_init_mode(std::string_view name) {
  for (const auto m : {IfcaInit::kRandom, IfcaInit::kWarmStart, IfcaInit::kLossArgmin}) {
    if (name == init_mode_name(m)) return m;
  }
  throw ConfigError("init_mode", "unknown init mode '" + std::string(name) +
                                     "' (expected random, warm-start or loss)");
}

HeterogeneityScenario ExperimentConfig::scenario_params() const {
  auto s = default_scenario(scenario);
  s.retain = retain;
  return s;
}

int ExperimentConfig::class_count() const {
  return static_cast<int>(scenario_params().class_count());
}

int ExperimentConfig::effective_k() const { return k.value_or(class_count()); }

ExperimentConfig ExperimentConfig::scaled() const {
  ExperimentConfig out = *this;
  out.scale = 1.0;
  if (scale == 1.0) return out;
  const int kc = class_count();
  const auto per_class = std::lround(static_cast<double>(n_clients) * scale / kc);
  out.n_clients = static_cast<int>(std::max<long>(1, per_class)) * kc;
  out.per_label = static_cast<int>(std::max<long>(1, std::lround(per_label * scale)));
  out.rounds = static_cast<int>(std::max<long>(2, std::lround(rounds * scale)));
  out.warmup_rounds = static_cast<int>(
      std::clamp<long>(std::lround(warmup_rounds * scale), 1, out.rounds - 1));
  return out;
}

void ExperimentConfig::validate() const {
  if (!is_known_dataset(dataset)) {
    throw ConfigError("dataset", "unknown dataset '" + dataset +
                                     "' (expected mnist, fashion-mnist, kmnist or synthetic)");
  }
  if (n_clients < 1) throw ConfigError("n_clients", "must be at least 1");
  if (n_clients % class_count() != 0) {
    throw ConfigError("n_clients", "must be a multiple of the scenario's " +
                                       std::to_string(class_count()) + " classes");
  }
  if (per_label < 1) throw ConfigError("per_label", "must be at least 1");
  if (test_per_label < 1) throw ConfigError("test_per_label", "must be at least 1");
  if (k && (*k < 1 || *k > n_clients)) {
    throw ConfigError("k", "must satisfy 1 <= k <= n_clients");
  }
  if (rounds < 1) throw ConfigError("rounds", "must be at least 1");
  if (epochs < 1) throw ConfigError("epochs", "must be at least 1");
  if (oracle_epochs < 1) throw ConfigError("oracle_epochs", "must be at least 1");
  if (!(lr >= 0.0) || !std::isfinite(lr)) throw ConfigError("lr", "must be non-negative");
  if (batch_size < 1) throw ConfigError("batch_size", "must be at least 1");
  if (regime == Regime::kServer && (warmup_rounds < 1 || warmup_rounds >= rounds)) {
    throw ConfigError("warmup_rounds", "must satisfy 1 <= warmup_rounds < rounds");
  }
  if (repeats < 1) throw ConfigError("repeats", "must be at least 1");
  if (!(scale > 0.0 && scale <= 1.0)) throw ConfigError("scale", "must lie in (0, 1]");
  if (!(retain >= 0.0 && retain <= 1.0)) throw ConfigError("retain", "must lie in [0, 1]");
  if (jobs < 1) throw ConfigError("jobs", "must be at least 1");
}

RawDataset load_source(const ExperimentConfig& cfg) {
  const auto eff = cfg.scaled();
  if (eff.dataset == "synthetic") {
    const auto per_label = static_cast<std::size_t>(eff.n_clients) *
                           static_cast<std::size_t>(eff.per_label);
    const auto test = static_cast<std::size_t>(eff.class_count()) *
                      static_cast<std::size_t>(eff.test_per_label);
    return synth_dataset(eff.seed, per_label, test);
  }
  return load_dataset(eff.dataset, eff.data_root);
}

std::pair<double, double> aggregate_accuracy(std::span<const double> fractions) {
  if (fractions.empty()) return {0.0, 0.0};
  const double n = static_cast<double>(fractions.size());
  const double mean = std::accumulate(fractions.begin(), fractions.end(), 0.0) / n;
  double var = 0.0;
  for (const double f : fractions) var += (f - mean) * (f - mean);
  var /= n;
  return {100.0 * mean, 100.0 * std::sqrt(var)};
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  return run_experiment(cfg, load_source(cfg));
}

ExperimentResult run_experiment(const ExperimentConfig& cfg_in, const RawDataset& data,
                                const ExecutionOptions& exec_in) {
  cfg_in.validate();
  const auto cfg = cfg_in.scaled();
  cfg.validate();
  ExecutionOptions exec = exec_in;
  exec.jobs = std::max(exec.jobs, cfg.jobs);

  const auto clients = partition_clients(
      data, cfg.scenario_params(), static_cast<std::size_t>(cfg.n_clients),
      static_cast<std::size_t>(cfg.per_label), static_cast<std::size_t>(cfg.test_per_label),
      cfg.seed);

  TrainConfig train;
  train.learning_rate = cfg.lr;
  train.epochs = cfg.epochs;
  train.batch_size = cfg.batch_size;
  train.seed = cfg.seed;

  ExperimentResult result;
  result.config = cfg;
  result.seed_label = std::to_string(cfg.seed);
  for (const auto& c : clients) result.truth.push_back(c.het_class);

  const int k = cfg.effective_k();
  auto collect = [&](const ClusteredResult& r) {
    for (const auto& acc : r.accuracies) {
      if (acc.accuracy) result.group_accuracies.push_back(*acc.accuracy);
    }
    result.assignment = r.assignment;
    result.metrics = clustering_metrics(result.truth, result.assignment);
  };

  switch (cfg.regime) {
    case Regime::kFl: {
      const auto r = run_fedavg(clients, cfg.rounds, train, cfg.seed, exec);
      result.group_accuracies = {r.pooled_accuracy};
      break;
    }
    case Regime::kOracle: {
      train.epochs = cfg.oracle_epochs;
      const auto r = run_oracle(clients, train, exec);
      result.group_accuracies = r.class_accuracies;
      break;
    }
    case Regime::kServer: {
      ServerCflOptions opts;
      opts.warmup_rounds = cfg.warmup_rounds;
      collect(run_server_cfl(clients, k, cfg.rounds, train, cfg.seed, opts, exec));
      break;
    }
    case Regime::kClient: {
      IfcaOptions opts;
      opts.init = cfg.init_mode;
      if (cfg.init_mode == IfcaInit::kWarmStart) {
        // Expert guess: the ground-truth class, folded into k clusters.
        for (const int t : result.truth) opts.warm_assignment.push_back(t % k);
      }
      collect(run_ifca(clients, k, cfg.rounds, train, cfg.seed, opts, exec));
      break;
    }
  }
  const auto [mean, sd] = aggregate_accuracy(result.group_accuracies);
  result.accuracy_mean = mean;
  result.accuracy_std = sd;
  return result;
}

std::vector<ExperimentResult> run_repeats(const ExperimentConfig& cfg, const RawDataset& data,
                                          const ExecutionOptions& exec) {
  cfg.validate();
  std::vector<ExperimentResult> rows;
  for (int r = 0; r < cfg.repeats; ++r) {
    ExperimentConfig run_cfg = cfg;
    run_cfg.seed = cfg.seed + static_cast<std::uint64_t>(r);
    rows.push_back(run_experiment(run_cfg, data, exec));
  }
  if (cfg.repeats > 1) {
    ExperimentResult pooled;
    pooled.config = rows.front().config;
    pooled.config.seed = cfg.seed;
    pooled.seed_label = "pooled";
    std::vector<double> means;
    for (const auto& row : rows) means.push_back(row.accuracy_mean / 100.0);
    const auto [mean, sd] = aggregate_accuracy(means);
    pooled.accuracy_mean = mean;
    pooled.accuracy_std = sd;
    if (rows.front().metrics) {
      MetricsReport m;
      for (const auto& row : rows) {
        m.ari += row.metrics->ari;
        m.ami += row.metrics->ami;
        m.homogeneity += row.metrics->homogeneity;
        m.completeness += row.metrics->completeness;
        m.v_measure += row.metrics->v_measure;
      }
      const double n = static_cast<double>(rows.size());
      m.ari /= n;
      m.ami /= n;
      m.homogeneity /= n;
      m.completeness /= n;
      m.v_measure /= n;
      pooled.metrics = m;
    }
    rows.push_back(std::move(pooled));
  }
  return rows;
}

std::vector<SweepPoint> cluster_sweep(const ExperimentConfig& cfg, std::span<const int> k_values,
                                      const RawDataset& data, const ExecutionOptions& exec) {
  if (k_values.empty()) throw ConfigError("k", "sweep needs at least one k value");
  std::vector<SweepPoint> points;
  for (const int k : k_values) {
    ExperimentConfig point_cfg = cfg;
    point_cfg.regime = Regime::kServer;
    point_cfg.k = k;
    SweepPoint p;
    p.k = k;
    p.result = run_experiment(point_cfg, data, exec);
    p.accuracy_mean = p.result.accuracy_mean;
    points.push_back(std::move(p));
  }
  return points;
}

}  // namespace fedclave
