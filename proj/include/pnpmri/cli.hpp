#pragma once

#include <string>
#include <vector>

namespace pnpmri {

// Exit codes: 0 success, 1 I/O error, 2 validation error, 3 numerical divergence.
inline constexpr int kExitOk = 0;
inline constexpr int kExitIo = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitDivergence = 3;

/// Runs the `simulate | train | reconstruct | evaluate` command line in
/// process and returns the exit code (args exclude the program name).
int run_cli(const std::vector<std::string>& args);

}  // namespace pnpmri
