#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "qropt/quantum.hpp"
#include "qropt/repeater.hpp"
#include "qropt/rng.hpp"

namespace qropt::sim {

inline constexpr double kDefaultFiberSpeedKmS = 200000.0;

struct LinkSpec {
  double length_km = 0.0;
  double attenuation_db_per_km = 0.0;  // informational only
  double baseline_f_el = 1.0;
  double baseline_p_suc = 1.0;
  double t_cycle_s = 0.0;  // per-attempt duration, > 0 once resolved
};

struct ChainTopology {
  std::vector<std::string> node_names;  // >= 2 nodes
  std::vector<LinkSpec> links;          // node count - 1
  double t_swap_s = 0.0;
  double c_fiber_km_s = kDefaultFiberSpeedKmS;

  int n_nodes() const { return static_cast<int>(node_names.size()); }
  int n_repeaters() const { return n_nodes() - 2; }
  void validate() const;

  static ChainTopology uniform(int n_nodes, double internode_km,
                               double baseline_f_el, double baseline_p_suc,
                               double t_swap_s = 0.0,
                               double c_fiber_km_s = kDefaultFiberSpeedKmS);
  static ChainTopology load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;
};

enum class NoiseMode {
  kFull,    // density-matrix evolution with T1/T2 memory decay
  kWerner,  // Appendix-style Werner bookkeeping, no memory decoherence
};

enum class DephasingScope {
  // T2 dephasing accrues only while the holding node attempts entanglement
  // generation (induced dephasing); T1 damping accrues over all elapsed time.
  kAttemptWindows,
  // both noise components accrue over all elapsed time
  kContinuous,
};

struct SimConfig {
  NoiseMode noise_mode = NoiseMode::kFull;
  DephasingScope dephasing_scope = DephasingScope::kAttemptWindows;
  std::uint64_t rng_seed = 0;
};

struct RunOutcome {
  StateMatrix end_to_end_state;
  double completion_time_s = 0.0;
  double fidelity = 0.0;  // with psi+
};

struct RunStats {
  std::int64_t n_runs = 0;
  double mean_fidelity = 0.0;
  double fidelity_stderr = 0.0;
  double mean_time_s = 0.0;
  double rate_hz = 0.0;  // 1 / mean_time exactly
  double rate_stderr_hz = 0.0;
};

// Attempts until the first success, geometric with mean 1/p_suc.
std::int64_t sample_attempt_count(double p_suc, Rng& rng);

// One SWAP-ASAP delivery of an end-to-end pair. Sequential generation: every
// node works one link at a time, repeaters strictly left link first; swaps
// fire as soon as a repeater holds pairs on both sides. Per-link parameters
// are indexed like topology.links; node-level parameters (s_q, T1, T2) are
// read from the first entry.
RunOutcome simulate_run(const ChainTopology& topology,
                        std::span<const RepeaterParams> per_link,
                        const SimConfig& config, std::uint64_t seed);
RunOutcome simulate_run(const ChainTopology& topology,
                        const RepeaterParams& params, const SimConfig& config,
                        std::uint64_t seed);
// config.rng_seed variants
RunOutcome simulate_run(const ChainTopology& topology,
                        const RepeaterParams& params, const SimConfig& config);

// n_runs independent runs with per-run seeds derived from master_seed;
// aggregation is in run-index order so results do not depend on scheduling.
RunStats simulate_batch(const ChainTopology& topology,
                        std::span<const RepeaterParams> per_link,
                        const SimConfig& config, std::int64_t n_runs,
                        std::uint64_t master_seed);
RunStats simulate_batch(const ChainTopology& topology,
                        const RepeaterParams& params, const SimConfig& config,
                        std::int64_t n_runs, std::uint64_t master_seed);

}  // namespace qropt::sim
