#pragma once

#include <iosfwd>

namespace moser::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitIncomplete = 2;
inline constexpr int kExitUsage = 64;

/// Runs one command line (argv[0] is the program name) and returns the exit
/// code. Results go to `out`, diagnostics and progress to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace moser::cli
