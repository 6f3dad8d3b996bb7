#include <cstdio>
#include <exception>
#include <string>

#include "CLI11.hpp"
#include "qropt/orchestrator.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "Repeater-chain hardware optimization: SWAP-ASAP simulation driven by "
      "a genetic algorithm, with sweep/validate/benchmark modes"};

  std::string config_path;
  std::string mode;
  std::uint64_t seed = 0;
  bool seed_given = false;
  int jobs = 0;
  std::string out_dir;

  app.add_option("--config", config_path, "run configuration file (ini)")
      ->required()
      ->check(CLI::ExistingFile);
  app.add_option("--mode", mode,
                 "override the configured mode: optimize|sweep|validate|benchmark");
  app.add_option("--seed", seed, "master seed (overrides the config)")
      ->each([&](const std::string&) { seed_given = true; });
  app.add_option("--jobs", jobs, "number of evaluation workers");
  app.add_option("--out", out_dir, "output directory for csv/json results");

  CLI11_PARSE(app, argc, argv);

  try {
    qropt::orch::RunManifest manifest =
        qropt::orch::RunManifest::load(config_path);
    if (!mode.empty()) manifest.mode = qropt::orch::parse_mode(mode);
    if (seed_given) manifest.master_seed = seed;
    if (jobs > 0) manifest.jobs = jobs;
    if (!out_dir.empty()) manifest.out_dir = out_dir;
    return qropt::orch::run_manifest(manifest);
  } catch (const std::exception& error) {
    std::fprintf(stderr, "error: %s\n", error.what());
    return 1;
  }
}
