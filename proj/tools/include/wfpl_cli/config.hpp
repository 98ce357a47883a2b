#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "wfpl/problem.hpp"

namespace wfpl::cli {

struct ExperimentConfig {
  std::string experiment;
  ProblemSpec spec;
  std::size_t n_cells = 64;
  double grading = 1.0;
  int quadrature_order = 10;
  double tol = 0.0;  // 0 selects the solver default
  int max_iterations = 10000;
  std::string data = "spike";  // zero | constant | spike | path to a CSV
  double data_value = 1.0;     // constant level or spike mass
  std::uint64_t seed = 20240611;
  std::vector<double> levels;  // scheme levels or harnack mesh sizes
  double m = 0.0;              // stampacchia integrability; 0 selects 2 N/(ps)
  double alpha = 1.0;
  int samples = 2000;
  int trials = 500;
  std::vector<std::pair<double, double>> besov_pairs;
  std::string output_dir = "out";
  std::string kernel_cache;

  /// Resolved settings as canonical strings (plumbing keys excluded).
  std::map<std::string, std::string> resolved() const;
};

/// Line-oriented "key = value" text, '#' starts a comment. Unknown keys,
/// malformed numbers and invalid specs throw ConfigError.
ExperimentConfig parse_config(std::string_view text);

/// Accepts either key = value text or a summary.json whose "config" object
/// holds the resolved settings.
ExperimentConfig load_config_text(std::string_view text);

void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value);

/// Re-checks the spec and the experiment-independent fields.
void validate(const ExperimentConfig& cfg);

}  // namespace wfpl::cli
