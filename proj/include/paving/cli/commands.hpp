#pragma once

#include <iosfwd>

namespace paving::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUnverified = 1;
inline constexpr int kExitUsage = 2;

/// Parses argv and runs one subcommand. Returns 0 on success, 1 when a
/// certificate or bound fails to verify, 2 for usage, spec and feasibility errors.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace paving::cli
