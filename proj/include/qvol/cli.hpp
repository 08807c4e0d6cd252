#pragma once

#include <ostream>

namespace qvol::cli {

// Exit codes: 0 success, 1 usage error, 2 invalid model parameters, 3 numerical failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitInvalidParams = 2;
inline constexpr int kExitFailure = 3;

// Subcommands: price, converge, mc, steady-state, diagnose.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qvol::cli
