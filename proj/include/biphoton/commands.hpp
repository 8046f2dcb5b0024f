#pragma once

// The four simulator commands and the argv front end shared by the
// biphoton-sim binary and the tests.

#include <filesystem>
#include <iosfwd>
#include <optional>

#include "biphoton/config.hpp"

namespace biphoton::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitRuntime = 2;

/// Amplitudes and joint-probability tables of the emitted state.
void cmd_state(const RunConfig& cfg, std::ostream& out);

/// Fringe scan; writes scan.csv (and scan.svg) under the output directory
/// and prints per-port fit results.
void cmd_scan(const RunConfig& cfg, std::ostream& out);

/// Closed-loop phase lock; writes lock.csv (and lock.svg) and prints the
/// settled phase statistics.
void cmd_lock(const RunConfig& cfg, std::ostream& out);

/// Visibility, QBER, conditional detection probability and spectral
/// brightness, either from a count CSV or from a simulated peak-angle run.
void cmd_metrics(const RunConfig& cfg, const std::optional<std::filesystem::path>& counts_csv, std::ostream& out);

/// biphoton-sim <state|scan|lock|metrics> --config <path> [--out <dir>]
///              [--seed <u64>] [--svg] [--counts <csv>]
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace biphoton::cli
