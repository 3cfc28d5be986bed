#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fptlab::cli {

inline constexpr const char* kVersion = "1.0.0";
inline constexpr const char* kSchema = "fptlab.result/1";

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kValidation = 2,
  kNumerical = 3,
};

/// Parses argv, runs one subcommand and writes the result envelope to --out
/// (or `out` when no path is given). Diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fptlab::cli
