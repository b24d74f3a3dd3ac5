#pragma once

#include <iosfwd>

namespace macfb::cli {

/// Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error.
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Entry point of the `macfb` tool. Subcommands: theory, simulate, sweep,
/// drf, codebook. Results go to --out (plus `<out>.manifest.json`) or to
/// `out` when no path is given; diagnostics go to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace macfb::cli
