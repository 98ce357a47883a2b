#include <cstdint>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "wfpl/error.hpp"
#include "wfpl/io.hpp"
#include "wfpl/parallel.hpp"
#include "wfpl_cli/experiments.hpp"

int main(int argc, char** argv) {
  using namespace wfpl;
  CLI::App app{"Weighted fractional p-Laplacian experiments"};
  std::string experiment, config_path, out_dir;
  unsigned threads = 0;
  std::optional<std::uint64_t> seed;
  app.add_option("experiment", experiment, "One of: assemble, solve, eigen, entropy-run, reaction-run, "
                                           "harnack-suite, verify-inequalities, stampacchia")
      ->required();
  app.add_option("--config", config_path, "key = value file or a previous summary.json");
  app.add_option("--out", out_dir, "Output directory (overrides output_dir)");
  app.add_option("--threads", threads, "Worker cap (0 = hardware)");
  app.add_option("--seed", seed, "RNG seed override");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kExitConfig;
  }

  try {
    cli::ExperimentConfig cfg = config_path.empty() ? cli::parse_config("") : cli::load_config_text(read_text_file(config_path));
    cfg.experiment = experiment;
    if (seed) cfg.seed = *seed;
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    set_max_threads(threads);
    const cli::ExperimentResult res = cli::run_experiment(cfg);
    cli::write_artifacts(res, cfg.output_dir);
    for (const auto& line : res.log) std::cout << line << "\n";
    return res.exit_code;
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return cli::kExitConfig;
  } catch (const ValidationError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return cli::kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "failed: " << e.what() << "\n";
    return cli::kExitViolation;
  }
}
