#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qropt/chain_sim.hpp"
#include "qropt/cost.hpp"
#include "qropt/ga.hpp"
#include "qropt/werner.hpp"

namespace qropt::orch {

enum class RunMode { kOptimize, kSweep, kValidate, kBenchmark };

RunMode parse_mode(const std::string& name);
std::string mode_name(RunMode mode);

struct BenchmarkSettings {
  std::string function = "rastrigin";  // quartic | rastrigin
  int dimension = 0;                   // 0 = the function's canonical size
  bool noise = false;
};

struct SweepSettings {
  std::string parameter = "f_el";  // f_el | p_suc | s_q | t1 | t2
  std::string metric = "fidelity"; // fidelity | rate
  double threshold = 0.7;
  std::int64_t runs = 100;
};

struct WernerSettings {
  werner::WernerBaselines baselines;
  // derive the GA search box by bisecting each parameter against the targets
  // before optimizing, the sensitivity-analysis preprocessing step
  bool auto_bounds = true;
};

struct BoundsOverride {
  std::string gene;
  double lower = 0.0;
  double upper = 1.0;
};

struct RunManifest {
  RunMode mode = RunMode::kOptimize;
  std::filesystem::path topology_file;
  std::filesystem::path baselines_file;
  sim::SimConfig sim;
  cost::CostConfig cost;
  ga::GaConfig ga;  // bounds filled by resolve() when left empty
  std::vector<BoundsOverride> explicit_bounds;
  std::int64_t runs_per_individual = 100;
  int stagnation_window = 0;  // 0 = run the full generation budget
  std::uint64_t master_seed = 0;
  int jobs = 1;
  std::filesystem::path out_dir;
  BenchmarkSettings benchmark;
  SweepSettings sweep;
  WernerSettings werner;

  static RunManifest load(const std::filesystem::path& config_path);
};

struct IndividualRecord {
  ga::Genome genes;
  double cost = 0.0;
  bool has_metrics = false;
  double mean_fidelity = 0.0;
  double fidelity_stderr = 0.0;
  double rate_hz = 0.0;
  bool has_physical = false;
  RepeaterParams physical;
};

struct GenerationRecord {
  int index = 0;
  std::vector<IndividualRecord> individuals;
  int best_index = 0;
  double best_cost = 0.0;
  double mean_cost = 0.0;
};

struct BestSolution {
  int generation = 0;
  int individual = 0;
  double cost = 0.0;
  ga::Genome genes;
  bool has_physical = false;
  RepeaterParams physical;
};

struct OptimizationHistory {
  RunMode mode = RunMode::kOptimize;
  std::vector<std::string> gene_names;
  std::vector<GenerationRecord> generations;

  std::optional<BestSolution> best() const;
};

// Loads referenced files, fills gene names and search bounds (explicit
// overrides win, validate mode may bisect its own), and returns the manifest
// actually executed. Idempotent and deterministic in the master seed.
RunManifest resolve(const RunManifest& manifest);

// The generation loop: evaluate every chromosome (batched simulation or
// benchmark function), hand the cost vector to the GA, repeat. Streams
// per-generation CSV rows into out_dir when one is set, so an aborted run
// leaves the completed generations behind.
OptimizationHistory run_optimization(const RunManifest& manifest);

struct SweepResult {
  std::string parameter;
  std::string metric;
  double threshold = 0.0;
  double crossing = 0.0;    // upper end of the final bracket
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  int iterations = 0;
  // GA search interval for this gene: [crossing, 1)
};

// Holds every parameter perfect except one and bisects it against the
// threshold; the response must be monotone in the swept gene. Throws when
// the threshold is not attainable even at the perfect value.
SweepResult sensitivity_sweep(const sim::ChainTopology& topology,
                              const std::string& metric, double threshold,
                              const std::string& parameter,
                              const sim::SimConfig& sim_config,
                              std::int64_t runs, std::uint64_t seed,
                              int iterations = 12);

// Appendix-style bound propagation to a chain with at least as many
// repeaters over the same span: the p_suc gene is floored at the previous
// best solution, everything else is left untouched.
ga::GeneBounds propagate_bounds(const OptimizationHistory& previous,
                                const sim::ChainTopology& previous_topology,
                                const sim::ChainTopology& new_topology,
                                ga::GeneBounds bounds);

// history.csv, summary.json and a manifest.ini echo with resolved defaults.
// Re-emission of the same history produces identical bytes.
void emit_results(const OptimizationHistory& history,
                  const RunManifest& manifest,
                  const std::filesystem::path& directory);

// CLI entry: dispatches on mode, writes outputs, returns a process exit code.
int run_manifest(const RunManifest& manifest);

// Index-parallel evaluation helper; results must be written by index so the
// worker count never changes the outcome.
void parallel_for(int n, int jobs, const std::function<void(int)>& fn);

std::string format_double(double v);

}  // namespace qropt::orch
