#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "wfpl/report.hpp"
#include "wfpl_cli/config.hpp"

namespace wfpl::cli {

enum ExitCode : int { kExitOk = 0, kExitViolation = 1, kExitConfig = 2 };

struct ExperimentResult {
  nlohmann::json summary;                 // deterministic, keys sorted
  std::map<std::string, Series> series;   // written as series_<name>.csv
  std::vector<std::string> log;           // human-readable lines
  int exit_code = kExitOk;
};

const std::vector<std::string>& experiment_names();

/// Runs one pipeline. Throws ConfigError for unknown experiments and
/// configuration problems detected while building inputs.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// JSON text with sorted keys, two-space indent and every floating point
/// number printed as %.17e (non-finite values become null).
std::string format_json(const nlohmann::json& j);

/// summary.json, series_<name>.csv and run.log (the only file with timestamps).
void write_artifacts(const ExperimentResult& result, const std::filesystem::path& dir);

}  // namespace wfpl::cli
