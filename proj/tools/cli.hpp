#pragma once

#include <ostream>
#include <span>
#include <string>

namespace fedclave::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntimeError = 1;
inline constexpr int kExitConfigError = 2;

// Entry point behind the fedclave binary. args[0] is the program name.
// Subcommands: run, table <scenario>, sweep, partition-audit.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace fedclave::cli
