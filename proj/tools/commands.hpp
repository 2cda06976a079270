#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bmf::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

// Runs the command line `args` (without the program name). Returns the
// process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

std::string version_string();

}  // namespace bmf::cli
