#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace viab::cli {

/// Exit codes of run().
inline constexpr int kOk = 0;
inline constexpr int kUsage = 1;
inline constexpr int kConfigError = 2;
inline constexpr int kNumericFailure = 3;

/// Environment variable that sets the output directory when --out is absent.
inline constexpr const char* kOutDirEnv = "VIAB_OUT_DIR";

/// Runs `viabctl <subcommand> <config.json> [--out DIR] [--workers N]`.
/// args excludes the program name. Progress lines go to `out`, diagnostics
/// to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Names of all subcommands, in help order.
const std::vector<std::string>& subcommands();

}  // namespace viab::cli
