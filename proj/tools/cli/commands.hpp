#pragma once

#include <iosfwd>

namespace mslayout::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitInvalidInput = 2;

/// Parses the command line and runs one subcommand, writing results to `out`
/// and diagnostics to `err`. Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mslayout::cli
