#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "fedclave/data_ingest.hpp"
#include "fedclave/errors.hpp"

namespace testing {

// Fresh directory under the system temp path, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("fedclave_" + tag + "_" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline void write_bytes(const std::filesystem::path& p, const std::vector<std::uint8_t>& bytes) {
  std::filesystem::create_directories(p.parent_path());
  std::ofstream f(p, std::ios::binary);
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

// Directory holding real IDX datasets, if configured.
inline std::optional<std::filesystem::path> data_root_with(const std::string& dataset) {
  const char* env = std::getenv("FEDCLAVE_DATA_ROOT");
  if (!env || !*env) return std::nullopt;
  const std::filesystem::path root = env;
  if (!std::filesystem::exists(root / dataset / "train-images-idx3-ubyte")) return std::nullopt;
  return root;
}

template <typename F>
fedclave::ErrorCode error_code_of(F&& f) {
  try {
    f();
  } catch (const fedclave::Error& e) {
    return e.code();
  }
  throw std::logic_error("expected fedclave::Error");
}

}  // namespace testing
