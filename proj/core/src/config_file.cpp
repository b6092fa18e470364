#include "fedclave/config_file.hpp"

#include <charconv>
#include <fstream>

#include "fedclave/errors.hpp"

namespace fedclave {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc{} || ptr != end) {
    throw ConfigError(std::string(key), "invalid number '" + std::string(value) + "'");
  }
  return out;
}

double parse_real(std::string_view key, std::string_view value) {
  // std::from_chars for double is unavailable in some standard libraries.
  std::string s(value);
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty()) {
    throw ConfigError(std::string(key), "invalid number '" + s + "'");
  }
  return out;
}

}  // namespace

std::map<std::string, std::string> parse_key_values(std::istream& in) {
  std::map<std::string, std::string> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(lineno), "expected key=value");
    }
    const auto key = trim(t.substr(0, eq));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno), "empty key");
    out[std::string(key)] = std::string(trim(t.substr(eq + 1)));
  }
  return out;
}

std::map<std::string, std::string> read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot read " + path.string());
  return parse_key_values(in);
}

void apply_setting(ExperimentConfig& cfg, std::string_view key, std::string_view value) {
  const std::string k(key);
  if (key == "dataset") cfg.dataset = std::string(value);
  else if (key == "scenario") cfg.scenario = parse_scenario(value);
  else if (key == "regime") cfg.regime = parse_regime(value);
  else if (key == "n_clients" || key == "clients") cfg.n_clients = parse_number<int>(k, value);
  else if (key == "per_label") cfg.per_label = parse_number<int>(k, value);
  else if (key == "test_per_label") cfg.test_per_label = parse_number<int>(k, value);
  else if (key == "k") cfg.k = parse_number<int>(k, value);
  else if (key == "rounds") cfg.rounds = parse_number<int>(k, value);
  else if (key == "epochs") cfg.epochs = parse_number<int>(k, value);
  else if (key == "oracle_epochs") cfg.oracle_epochs = parse_number<int>(k, value);
  else if (key == "lr") cfg.lr = parse_real(k, value);
  else if (key == "batch_size") cfg.batch_size = parse_number<int>(k, value);
  else if (key == "warmup_rounds") cfg.warmup_rounds = parse_number<int>(k, value);
  else if (key == "seed") cfg.seed = parse_number<std::uint64_t>(k, value);
  else if (key == "repeats") cfg.repeats = parse_number<int>(k, value);
  else if (key == "scale") cfg.scale = parse_real(k, value);
  else if (key == "retain") cfg.retain = parse_real(k, value);
  else if (key == "init_mode") cfg.init_mode = parse_init_mode(value);
  else if (key == "data_root") cfg.data_root = std::string(value);
  else if (key == "jobs") cfg.jobs = parse_number<int>(k, value);
  else throw ConfigError(k, "unknown configuration key");
}

void apply_settings(ExperimentConfig& cfg, const std::map<std::string, std::string>& settings) {
  for (const auto& [key, value] : settings) apply_setting(cfg, key, value);
}

}  // namespace fedclave
