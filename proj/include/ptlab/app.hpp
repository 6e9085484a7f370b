#pragma once

#include "ptlab/config.hpp"

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace ptlab {

inline constexpr const char* kVersion = "0.1.0";

/// Everything a run produces, held in memory until the run has succeeded.
struct RunOutput {
    std::vector<std::pair<std::string, std::string>> files; ///< (relative name, contents), in write order
    std::string report;                                      ///< human-readable summary for stdout
};

/// Runs a validated scenario. Pure apart from reading edge-list files; no output is written.
RunOutput execute(const ScenarioConfig& cfg);

/// Creates `dir` and writes every file; returns the paths written. IoError on failure.
std::vector<std::string> write_outputs(const RunOutput& out, const std::string& dir);

/// Run manifest: config echo, version, seed, wall time, file list.
std::string manifest_json(const ScenarioConfig& cfg, const RunOutput& out, double wall_seconds);

/// Exit codes.
enum ExitCode : int { kExitOk = 0, kExitValidation = 2, kExitNumeric = 3, kExitIo = 4 };

/// Machine-readable error record (one JSON line).
std::string error_record(std::string_view kind, int code, const std::vector<std::string>& messages);

/**
 * Command-line entry point:
 *   ptlab <simulate|compare|bound|consensus|containment> --config F [--out D] [--seed S] [--threads N]
 *   ptlab run-all [--config DIR] [--out D] [--seed S] [--threads N]
 */
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace ptlab
