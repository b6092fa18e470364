#include "cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string_view>

#include "fedclave/config_file.hpp"
#include "fedclave/errors.hpp"
#include "fedclave/experiment.hpp"
#include "fedclave/heterogeneity.hpp"
#include "fedclave/report.hpp"

namespace fedclave::cli {

namespace {

struct FlagSpec {
  const char* flag;
  const char* key;
  const char* help;
};

// Every experiment flag maps onto one ExperimentConfig field.
constexpr FlagSpec kExperimentFlags[] = {
    {"--regime", "regime", "fl | oracle | client | server"},
    {"--dataset", "dataset", "mnist | fashion-mnist | kmnist | synthetic"},
    {"--scenario", "scenario",
     "concept-shift-features | concept-shift-labels | features-distribution-skew | "
     "labels-distribution-skew | quantity-skew | iid"},
    {"--clients", "n_clients", "number of clients (default 48)"},
    {"--per-label", "per_label", "train samples per label per client (default 100)"},
    {"--test-per-label", "test_per_label", "test samples per label per class (default 20)"},
    {"--k", "k", "number of clusters (default: the scenario's class count)"},
    {"--rounds", "rounds", "federated rounds (default 20)"},
    {"--epochs", "epochs", "local epochs per round (default 10)"},
    {"--oracle-epochs", "oracle_epochs", "centralized oracle epochs (default 50)"},
    {"--lr", "lr", "SGD learning rate (default 0.01)"},
    {"--batch-size", "batch_size", "mini-batch size (default 64)"},
    {"--warmup-rounds", "warmup_rounds", "global rounds before server-side clustering (default 5)"},
    {"--seed", "seed", "run seed (default 42)"},
    {"--repeats", "repeats", "repeats with seeds seed, seed+1, ... (default 1)"},
    {"--scale", "scale", "shrink clients, samples and rounds by this factor (default 1)"},
    {"--retain", "retain", "fraction of non-dominant labels kept under label skew (default 0.001)"},
    {"--init-mode", "init_mode", "IFCA round-0 assignment: random | warm-start | loss"},
    {"--data-root", "data_root", "dataset directory (default $FEDCLAVE_DATA_ROOT or ./data)"},
    {"--jobs", "jobs", "worker threads (default 1)"},
};

std::string flag_for_field(const std::string& field) {
  for (const auto& f : kExperimentFlags) {
    if (field == f.key) return f.flag;
  }
  if (field == "format") return "--format";
  if (field == "config") return "--config";
  if (field == "k_values") return "--k-values";
  return field;
}

struct Options {
  std::map<std::string, std::string> settings;
  std::string config_path;
  std::string out_dir = "results";
  std::string format = "csv";
  std::string k_values = "1,2,4,6,8,10,12";
  std::string table_scenario;
  bool verbose = false;
};

void add_common(CLI::App* cmd, Options& opts, std::string_view skip = {}) {
  for (const auto& f : kExperimentFlags) {
    const std::string key = f.key;
    if (key == skip) continue;
    cmd->add_option_function<std::string>(
        f.flag, [&opts, key](const std::string& v) { opts.settings[key] = v; }, f.help);
  }
  cmd->add_option("--config", opts.config_path, "key=value configuration file");
  cmd->add_option("--out", opts.out_dir, "output directory (default ./results)");
  cmd->add_option("--format", opts.format, "csv | markdown | svg (default csv)");
  cmd->add_flag("--verbose", opts.verbose, "write per-round training and assignment logs");
}

ExperimentConfig build_config(const Options& opts, const ExperimentConfig& defaults) {
  ExperimentConfig cfg = defaults;
  if (const char* env = std::getenv("FEDCLAVE_DATA_ROOT"); env && *env) {
    cfg.data_root = env;
  } else {
    cfg.data_root = "data";
  }
  if (!opts.config_path.empty()) apply_settings(cfg, read_config_file(opts.config_path));
  apply_settings(cfg, opts.settings);
  cfg.validate();
  return cfg;
}

std::vector<int> parse_int_list(const std::string& text, const std::string& field) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw ConfigError(field, "invalid integer '" + item + "'");
    }
  }
  if (out.empty()) throw ConfigError(field, "empty list");
  return out;
}

std::vector<std::string> split(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  f << text;
}

std::string config_echo(const ExperimentConfig& c) {
  std::ostringstream os;
  os << "# effective configuration\n"
     << "dataset=" << c.dataset << "\nscenario=" << scenario_name(c.scenario)
     << "\nregime=" << regime_name(c.regime) << "\nn_clients=" << c.n_clients
     << "\nper_label=" << c.per_label << "\ntest_per_label=" << c.test_per_label
     << "\nk=" << c.effective_k() << "\nrounds=" << c.rounds << "\nepochs=" << c.epochs
     << "\noracle_epochs=" << c.oracle_epochs << "\nlr=" << c.lr
     << "\nbatch_size=" << c.batch_size << "\nwarmup_rounds=" << c.warmup_rounds
     << "\nseed=" << c.seed << "\nrepeats=" << c.repeats << "\nretain=" << c.retain
     << "\ninit_mode=" << init_mode_name(c.init_mode) << '\n'
     << "# weight init: U(-1/sqrt(fan_in), 1/sqrt(fan_in)), zero biases\n"
     << "# accuracy_std: population std across clusters (oracle: classes)\n"
     << "# AMI normalization: arithmetic mean\n";
  return os.str();
}

void write_results(const std::filesystem::path& dir, const std::string& stem,
                   const std::vector<ExperimentResult>& rows, ReportFormat format) {
  write_report(rows, dir / (stem + "." + std::string(report_extension(format))), format);
}

struct RunLogs {
  std::ostringstream rounds;
  std::ostringstream trace;
};

ExecutionOptions logging_exec(const ExperimentConfig& cfg, RunLogs& logs, bool verbose) {
  ExecutionOptions exec;
  exec.jobs = cfg.jobs;
  if (!verbose) return exec;
  logs.rounds << kRoundLogHeader << '\n';
  logs.trace << "round,client_id,cluster_id\n";
  exec.on_round = [&logs](const RoundLog& log) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%d,%.6f,%.6f\n", log.round, log.mean_train_loss,
                  log.test_accuracy);
    logs.rounds << buf;
  };
  exec.on_assignment = [&logs](int round, std::span<const int> assignment) {
    for (std::size_t i = 0; i < assignment.size(); ++i) {
      logs.trace << round << ',' << i << ',' << assignment[i] << '\n';
    }
  };
  return exec;
}

void write_assignments(const std::filesystem::path& path, const ExperimentResult& r) {
  std::ostringstream os;
  os << "client_id,het_class,cluster_id\n";
  for (std::size_t i = 0; i < r.assignment.size(); ++i) {
    os << i << ',' << r.truth[i] << ',' << r.assignment[i] << '\n';
  }
  write_text(path, os.str());
}

int cmd_run(const Options& opts, std::ostream& out) {
  ExperimentConfig defaults;
  const auto cfg = build_config(opts, defaults);
  const auto format = parse_report_format(opts.format);
  const std::filesystem::path dir = opts.out_dir;
  std::filesystem::create_directories(dir);

  const auto data = load_source(cfg);
  RunLogs logs;
  const auto exec = logging_exec(cfg, logs, opts.verbose);
  const auto rows = run_repeats(cfg, data, exec);
  write_results(dir, "run", rows, format);
  write_text(dir / "run.meta.txt", config_echo(rows.front().config));
  if (!rows.front().assignment.empty()) write_assignments(dir / "assignments.csv", rows.front());
  if (opts.verbose) {
    write_text(dir / "round_log.csv", logs.rounds.str());
    if (cfg.regime == Regime::kClient || cfg.regime == Regime::kServer) {
      write_text(dir / "assignment_trace.csv", logs.trace.str());
    }
  }
  write_csv(out, rows);
  return kExitOk;
}

int cmd_table(const Options& opts, std::ostream& out) {
  ExperimentConfig defaults;
  Options local = opts;
  local.settings["scenario"] = opts.table_scenario;
  if (!local.settings.count("dataset")) local.settings["dataset"] = "mnist,fashion-mnist,kmnist";
  const auto datasets = split(local.settings["dataset"]);
  if (datasets.empty()) throw ConfigError("dataset", "no datasets given");
  local.settings.erase("dataset");
  local.settings.erase("regime");
  const auto format = parse_report_format(opts.format);
  const std::filesystem::path dir = opts.out_dir;

  std::vector<ExperimentResult> rows;
  for (const auto& name : datasets) {
    local.settings["dataset"] = name;
    const auto base = build_config(local, defaults);
    std::filesystem::create_directories(dir);
    const auto data = load_source(base);
    for (const auto regime : {Regime::kFl, Regime::kOracle, Regime::kClient, Regime::kServer}) {
      auto cfg = base;
      cfg.regime = regime;
      ExecutionOptions exec;
      exec.jobs = cfg.jobs;
      for (auto& row : run_repeats(cfg, data, exec)) rows.push_back(std::move(row));
    }
  }
  const std::string stem = "table_" + opts.table_scenario;
  write_results(dir, stem, rows, format);
  write_text(dir / (stem + ".meta.txt"), config_echo(rows.front().config));
  write_csv(out, rows);
  return kExitOk;
}

int cmd_sweep(const Options& opts, std::ostream& out) {
  ExperimentConfig defaults;
  defaults.regime = Regime::kServer;
  defaults.scenario = ScenarioKind::kConceptShiftLabels;
  defaults.dataset = "mnist";
  const auto cfg = build_config(opts, defaults);
  const auto ks = parse_int_list(opts.k_values, "k_values");
  const auto format = parse_report_format(opts.format);
  const std::filesystem::path dir = opts.out_dir;
  std::filesystem::create_directories(dir);

  const auto data = load_source(cfg);
  ExecutionOptions exec;
  exec.jobs = cfg.jobs;
  const auto points = cluster_sweep(cfg, ks, data, exec);
  std::vector<ExperimentResult> rows;
  for (const auto& p : points) rows.push_back(p.result);
  write_results(dir, "sweep", rows, format);
  if (format != ReportFormat::kSvg) write_report(rows, dir / "sweep.svg", ReportFormat::kSvg);
  write_text(dir / "sweep.meta.txt", config_echo(cfg.scaled()));
  out << "k,accuracy_mean\n";
  for (const auto& p : points) out << p.k << ',' << format_score(p.accuracy_mean) << '\n';
  return kExitOk;
}

int cmd_partition_audit(const Options& opts, std::ostream& out) {
  ExperimentConfig defaults;
  const auto cfg = build_config(opts, defaults).scaled();
  const std::filesystem::path dir = opts.out_dir;
  std::filesystem::create_directories(dir);
  const auto data = load_source(cfg);
  const auto clients = partition_clients(
      data, cfg.scenario_params(), static_cast<std::size_t>(cfg.n_clients),
      static_cast<std::size_t>(cfg.per_label), static_cast<std::size_t>(cfg.test_per_label),
      cfg.seed);
  std::ostringstream manifest;
  write_partition_manifest(manifest, clients);
  write_text(dir / ("partition_" + std::string(scenario_name(cfg.scenario)) + ".txt"),
             manifest.str());
  out << manifest.str();
  return kExitOk;
}

}  // namespace

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"fedclave: clustered federated learning simulator", "fedclave"};
  app.require_subcommand(1);
  Options opts;

  auto* run_cmd = app.add_subcommand("run", "run one experiment configuration");
  add_common(run_cmd, opts);
  auto* table_cmd = app.add_subcommand("table", "run FL, oracle, client and server regimes");
  add_common(table_cmd, opts, "scenario");
  table_cmd->add_option("scenario", opts.table_scenario, "heterogeneity scenario")->required();
  auto* sweep_cmd = app.add_subcommand("sweep", "server-side accuracy against the number of clusters");
  add_common(sweep_cmd, opts);
  sweep_cmd->add_option("--k-values", opts.k_values, "comma-separated k list (default 1,2,4,6,8,10,12)");
  auto* audit_cmd = app.add_subcommand("partition-audit", "write the client partition manifest");
  add_common(audit_cmd, opts);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();  // program name
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    // Subcommand usage when one was selected.
    for (auto* sub : app.get_subcommands()) {
      err << sub->help();
      return kExitConfigError;
    }
    err << app.help();
    return kExitConfigError;
  }

  try {
    if (run_cmd->parsed()) return cmd_run(opts, out);
    if (table_cmd->parsed()) return cmd_table(opts, out);
    if (sweep_cmd->parsed()) return cmd_sweep(opts, out);
    if (audit_cmd->parsed()) return cmd_partition_audit(opts, out);
  } catch (const ConfigError& e) {
    const std::string flag = flag_for_field(e.field());
    std::string msg = e.what();
    if (const auto pos = msg.find(": "); pos != std::string::npos) msg = msg.substr(pos + 2);
    err << "error: " << flag << ": " << msg << '\n';
    return kExitConfigError;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntimeError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntimeError;
  }
  return kExitConfigError;
}

}  // namespace fedclave::cli
