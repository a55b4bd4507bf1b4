#include <cstdlib>
#include <iostream>

#include "CLI11.hpp"
#include "qmeas_cli/config.hpp"
#include "qmeas_cli/dispatch.hpp"

int main(int argc, char** argv) {
  using namespace qmeas::cli;
  CLI::App app{"qmeas: continuous fuzzy measurement simulator"};
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<unsigned> workers;
  bool quiet = false;
  app.add_option("--config", config_path, "Run configuration file")->required()->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "Override the configured seed");
  app.add_option("--out", out_dir, "Output directory (overrides [output] dir)");
  app.add_option("--workers", workers, "Worker threads; 0 = available parallelism (env QMEAS_WORKERS)");
  app.add_flag("--quiet", quiet, "Suppress the summary line");
  app.footer(config_reference());
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kSuccess : kValidationFailure;
  }

  RunConfig config;
  try {
    config = load_config(config_path);
  } catch (const qmeas::ValidationError& e) {
    std::cerr << config_path << ": " << e.what() << '\n';
    return kValidationFailure;
  }
  if (seed) config.seed = *seed;
  if (out_dir) config.output_dir = *out_dir;
  if (workers) {
    config.workers = *workers;
  } else if (const char* env = std::getenv("QMEAS_WORKERS"); env && *env) {
    try {
      config.workers = static_cast<unsigned>(std::stoul(env));
    } catch (const std::exception&) {
      std::cerr << "QMEAS_WORKERS must be a non-negative integer\n";
      return kValidationFailure;
    }
  }
  config.quiet = quiet;
  return dispatch(config, std::cout, std::cerr);
}
