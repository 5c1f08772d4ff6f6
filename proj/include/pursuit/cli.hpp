#pragma once

#include <cstdint>
#include <iosfwd>

namespace pursuit::cli {

inline constexpr std::uint64_t kDefaultSeed = 42;
inline constexpr const char* kSeedEnv = "PURSUIT_SEED";

enum ExitCode : int { kOk = 0, kUsage = 1, kData = 2 };

// Entry point of the `pursuit` binary. Subcommands: simulate, features,
// stats, power, train-eval, report.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pursuit::cli
