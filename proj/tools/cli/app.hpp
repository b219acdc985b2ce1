#pragma once

#include <string>
#include <vector>

namespace fracflow::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitUsage = 2;

/// Parses `args` (program name first) and runs one subcommand. Errors are
/// reported on stderr and mapped to the exit codes above.
int run(const std::vector<std::string>& args);

}  // namespace fracflow::cli
