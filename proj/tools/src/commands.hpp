#pragma once

#include <string>
#include <vector>

namespace myopic::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitCapability = 3;

/// Runs one invocation (arguments without the program name) and returns
/// the process exit code. Diagnostics go to stderr as one JSON object.
int run_cli(const std::vector<std::string>& args);

}  // namespace myopic::cli
