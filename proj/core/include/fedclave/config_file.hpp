#pragma once

#include <filesystem>
#include <istream>
#include <map>
#include <string>
#include <string_view>

#include "fedclave/experiment.hpp"

namespace fedclave {

// Flat key=value lines; blank lines and lines starting with '#' are ignored.
// Throws ConfigError naming the line on malformed input.
std::map<std::string, std::string> parse_key_values(std::istream& in);
std::map<std::string, std::string> read_config_file(const std::filesystem::path& path);

// Sets one ExperimentConfig field from its textual value. Keys are the field
// names (n_clients, per_label, lr, ...). Throws ConfigError(key) for unknown
// keys or unparsable values.
void apply_setting(ExperimentConfig& cfg, std::string_view key, std::string_view value);
void apply_settings(ExperimentConfig& cfg, const std::map<std::string, std::string>& settings);

}  // namespace fedclave
