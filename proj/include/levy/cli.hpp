#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace levy::cli {

/// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kIoFailure = 1;
inline constexpr int kInvalidConfig = 2;
inline constexpr int kGridCoverage = 3;

/// Runs one command line (args[0] is the program name) and returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Keys accepted in a config file. The "model" key holds a nested object.
const std::vector<std::string>& config_keys();

}  // namespace levy::cli
