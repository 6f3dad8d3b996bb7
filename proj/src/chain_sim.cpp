#include "qropt/chain_sim.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <queue>
#include <stdexcept>

#include "qropt/ini.hpp"

namespace qropt::sim {

void ChainTopology::validate() const {
  if (node_names.size() < 2)
    throw std::invalid_argument("ChainTopology: need at least two nodes");
  if (links.size() + 1 != node_names.size())
    throw std::invalid_argument(
        "ChainTopology: link count must equal node count - 1");
  if (t_swap_s < 0.0)
    throw std::invalid_argument("ChainTopology: t_swap must be >= 0");
  for (const LinkSpec& link : links) {
    if (link.length_km < 0.0)
      throw std::invalid_argument("ChainTopology: negative link length");
    if (!(link.baseline_f_el >= 0.0 && link.baseline_f_el <= 1.0))
      throw std::invalid_argument("ChainTopology: baseline_f_el out of range");
    if (!(link.baseline_p_suc > 0.0 && link.baseline_p_suc <= 1.0))
      throw std::invalid_argument(
          "ChainTopology: baseline_p_suc out of range");
    if (!(link.t_cycle_s > 0.0))
      throw std::invalid_argument("ChainTopology: t_cycle must be > 0");
  }
}

ChainTopology ChainTopology::uniform(int n_nodes, double internode_km,
                                     double baseline_f_el,
                                     double baseline_p_suc, double t_swap_s,
                                     double c_fiber_km_s) {
  if (n_nodes < 2)
    throw std::invalid_argument("ChainTopology: need at least two nodes");
  ChainTopology topo;
  topo.t_swap_s = t_swap_s;
  topo.c_fiber_km_s = c_fiber_km_s;
  for (int i = 0; i < n_nodes; ++i)
    topo.node_names.push_back("node" + std::to_string(i));
  LinkSpec link;
  link.length_km = internode_km;
  link.baseline_f_el = baseline_f_el;
  link.baseline_p_suc = baseline_p_suc;
  link.t_cycle_s = internode_km / c_fiber_km_s;
  topo.links.assign(n_nodes - 1, link);
  topo.validate();
  return topo;
}

ChainTopology ChainTopology::load(const std::filesystem::path& path) {
  const IniFile ini = IniFile::load(path);
  ChainTopology topo;
  topo.node_names = split(ini.get("chain", "nodes"), ',');
  topo.t_swap_s = ini.get_double_or("chain", "t_swap_s", 0.0);
  topo.c_fiber_km_s =
      ini.get_double_or("chain", "c_fiber_km_s", kDefaultFiberSpeedKmS);
  const int n_links = static_cast<int>(topo.node_names.size()) - 1;
  for (int i = 0; i < n_links; ++i) {
    const std::string section = "link." + std::to_string(i);
    if (!ini.has_section(section))
      throw std::runtime_error("topology: missing section [" + section + "]");
    LinkSpec link;
    link.length_km = ini.get_double(section, "length_km");
    link.attenuation_db_per_km =
        ini.get_double_or(section, "attenuation_db_per_km", 0.0);
    link.baseline_f_el = ini.get_double(section, "baseline_f_el");
    link.baseline_p_suc = ini.get_double(section, "baseline_p_suc");
    link.t_cycle_s = ini.get_double_or(section, "t_cycle_s",
                                       link.length_km / topo.c_fiber_km_s);
    topo.links.push_back(link);
  }
  topo.validate();
  return topo;
}

void ChainTopology::save(const std::filesystem::path& path) const {
  validate();
  std::ofstream out(path);
  if (!out) throw std::runtime_error("topology: cannot write " + path.string());
  out << "[chain]\n";
  out << "nodes = ";
  for (std::size_t i = 0; i < node_names.size(); ++i)
    out << (i ? "," : "") << node_names[i];
  out << "\n";
  char buf[64];
  const auto num = [&buf](double v) {
    snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  out << "t_swap_s = " << num(t_swap_s) << "\n";
  out << "c_fiber_km_s = " << num(c_fiber_km_s) << "\n";
  for (std::size_t i = 0; i < links.size(); ++i) {
    out << "\n[link." << i << "]\n";
    out << "length_km = " << num(links[i].length_km) << "\n";
    out << "attenuation_db_per_km = " << num(links[i].attenuation_db_per_km)
        << "\n";
    out << "baseline_f_el = " << num(links[i].baseline_f_el) << "\n";
    out << "baseline_p_suc = " << num(links[i].baseline_p_suc) << "\n";
    out << "t_cycle_s = " << num(links[i].t_cycle_s) << "\n";
  }
}

std::int64_t sample_attempt_count(double p_suc, Rng& rng) {
  return rng.geometric(p_suc);
}

namespace {

enum class NodeStatus { kIdle, kGenerating, kSwapping };
enum class LinkStatus { kPending, kGenerating, kDone };

struct QubitStamp {
  double wall_time = 0.0;
  double attempt_mark = 0.0;  // holding node's cumulative attempt time
};

struct Pair {
  int left_node = -1;
  int right_node = -1;
  StateMatrix rho;        // full mode
  double s_factor = 1.0;  // werner mode: product of swap qualities
  double x_factor = 1.0;  // werner mode: product of link Werner parameters
  QubitStamp stamp[2];    // 0 = left qubit, 1 = right qubit
};

struct Event {
  double time = 0.0;
  int kind = 0;  // 0 = link generated, 1 = swap completed
  int index = 0; // link index or swapping node
  int pair_left = -1;
  int pair_right = -1;
};

struct EventAfter {
  bool operator()(const Event& a, const Event& b) const {
    if (a.time != b.time) return a.time > b.time;
    if (a.kind != b.kind) return a.kind > b.kind;
    return a.index > b.index;  // ties resolve leftmost first
  }
};

struct NodeState {
  NodeStatus status = NodeStatus::kIdle;
  int left_pair = -1;
  int right_pair = -1;
  double cumulative_attempt_s = 0.0;
  double session_start_s = 0.0;
};

class ChainRun {
 public:
  ChainRun(const ChainTopology& topology,
           std::span<const RepeaterParams> per_link, const SimConfig& config,
           std::uint64_t seed)
      : topo_(topology),
        per_link_(per_link),
        config_(config),
        rng_(seed),
        nodes_(topology.n_nodes()),
        link_status_(topology.links.size(), LinkStatus::kPending) {
    node_params_ = per_link_[0];
  }

  RunOutcome run() {
    start_sessions(0.0);
    while (!delivered_) {
      if (queue_.empty())
        throw std::logic_error("chain_sim: event queue drained early");
      const Event e = queue_.top();
      queue_.pop();
      if (e.kind == 0)
        on_link_generated(e);
      else
        on_swap_completed(e);
      if (delivered_) break;
      start_swaps(e.time);
      start_sessions(e.time);
    }
    return outcome_;
  }

 private:
  bool werner() const { return config_.noise_mode == NoiseMode::kWerner; }

  // The link a node wants to work on: repeaters strictly finish their left
  // link before turning right, end nodes only have one choice.
  int desired_link(int node) const {
    const int n = topo_.n_nodes();
    if (node == 0)
      return link_status_[0] == LinkStatus::kPending ? 0 : -1;
    if (node == n - 1)
      return link_status_[n - 2] == LinkStatus::kPending ? n - 2 : -1;
    if (link_status_[node - 1] == LinkStatus::kPending) return node - 1;
    if (link_status_[node] == LinkStatus::kPending) return node;
    return -1;
  }

  void start_sessions(double now) {
    for (int link = 0; link < static_cast<int>(topo_.links.size()); ++link) {
      if (link_status_[link] != LinkStatus::kPending) continue;
      const int u = link;
      const int v = link + 1;
      if (nodes_[u].status != NodeStatus::kIdle ||
          nodes_[v].status != NodeStatus::kIdle)
        continue;
      if (desired_link(u) != link || desired_link(v) != link) continue;
      const std::int64_t attempts =
          sample_attempt_count(per_link_[link].p_suc, rng_);
      const double done =
          now + static_cast<double>(attempts) * topo_.links[link].t_cycle_s;
      link_status_[link] = LinkStatus::kGenerating;
      for (int node : {u, v}) {
        nodes_[node].status = NodeStatus::kGenerating;
        nodes_[node].session_start_s = now;
      }
      queue_.push({done, 0, link, -1, -1});
    }
  }

  void start_swaps(double now) {
    for (int node = 1; node + 1 < topo_.n_nodes(); ++node) {
      NodeState& state = nodes_[node];
      if (state.status != NodeStatus::kIdle) continue;
      if (state.left_pair < 0 || state.right_pair < 0) continue;
      const int left = state.left_pair;
      const int right = state.right_pair;
      // detach both pairs so no other swap can consume them meanwhile
      nodes_[pairs_[left].left_node].right_pair = -1;
      nodes_[pairs_[right].right_node].left_pair = -1;
      state.left_pair = -1;
      state.right_pair = -1;
      state.status = NodeStatus::kSwapping;
      queue_.push({now + topo_.t_swap_s, 1, node, left, right});
    }
  }

  double attempt_time_at(int node, double now) const {
    const NodeState& state = nodes_[node];
    double total = state.cumulative_attempt_s;
    if (state.status == NodeStatus::kGenerating)
      total += now - state.session_start_s;
    return total;
  }

  // Lazily applied storage noise: amplitude damping over the wall-clock
  // interval, dephasing over the node's attempt windows (or the full interval
  // in continuous scope).
  void refresh_qubit(Pair& pair, int side, double now) {
    QubitStamp& stamp = pair.stamp[side];
    const int node = side == 0 ? pair.left_node : pair.right_node;
    const double att_now = attempt_time_at(node, now);
    if (!werner()) {
      const double wall_dt = now - stamp.wall_time;
      const double deph_dt =
          config_.dephasing_scope == DephasingScope::kContinuous
              ? wall_dt
              : att_now - stamp.attempt_mark;
      const double p_damp = -std::expm1(-wall_dt / node_params_.t1_s);
      const double p_deph = dephasing_probability(deph_dt, node_params_.t1_s,
                                                  node_params_.t2_s);
      pair.rho = amplitude_damp_qubit(pair.rho, side, p_damp);
      pair.rho = dephase_qubit(pair.rho, side, p_deph);
    }
    stamp.wall_time = now;
    stamp.attempt_mark = att_now;
  }

  void on_link_generated(const Event& e) {
    const int link = e.index;
    const int u = link;
    const int v = link + 1;
    for (int node : {u, v}) {
      nodes_[node].cumulative_attempt_s +=
          e.time - nodes_[node].session_start_s;
      nodes_[node].status = NodeStatus::kIdle;
    }
    link_status_[link] = LinkStatus::kDone;

    Pair pair;
    pair.left_node = u;
    pair.right_node = v;
    const double f_el = per_link_[link].f_el;
    if (werner()) {
      pair.s_factor = 1.0;
      pair.x_factor = werner_x_from_fidelity(f_el);
    } else {
      pair.rho = elementary_link_state(f_el);
    }
    for (int side : {0, 1}) {
      const int node = side == 0 ? u : v;
      pair.stamp[side] = {e.time, attempt_time_at(node, e.time)};
    }
    const int id = static_cast<int>(pairs_.size());
    pairs_.push_back(std::move(pair));
    nodes_[u].right_pair = id;
    nodes_[v].left_pair = id;
    maybe_deliver(id, e.time);
  }

  void on_swap_completed(const Event& e) {
    const int node = e.index;
    Pair& left = pairs_[e.pair_left];
    Pair& right = pairs_[e.pair_right];
    const int a = left.left_node;
    const int b = right.right_node;

    Pair joined;
    joined.left_node = a;
    joined.right_node = b;
    if (werner()) {
      joined.s_factor = left.s_factor * right.s_factor * node_params_.s_q;
      joined.x_factor = left.x_factor * right.x_factor;
    } else {
      refresh_qubit(left, 0, e.time);
      refresh_qubit(left, 1, e.time);
      refresh_qubit(right, 0, e.time);
      refresh_qubit(right, 1, e.time);
      const StateMatrix left_noisy =
          depolarize_qubit(left.rho, 1, node_params_.s_q);
      const StateMatrix right_noisy =
          depolarize_qubit(right.rho, 0, node_params_.s_q);
      joined.rho = swap_bsm(left_noisy, right_noisy);
    }
    joined.stamp[0] = left.stamp[0];
    joined.stamp[1] = right.stamp[1];
    if (werner())
      for (int side : {0, 1}) {
        const int holder = side == 0 ? a : b;
        joined.stamp[side] = {e.time, attempt_time_at(holder, e.time)};
      }

    nodes_[node].status = NodeStatus::kIdle;
    const int id = static_cast<int>(pairs_.size());
    pairs_.push_back(std::move(joined));
    nodes_[a].right_pair = id;
    nodes_[b].left_pair = id;
    maybe_deliver(id, e.time);
  }

  void maybe_deliver(int pair_id, double now) {
    const Pair& pair = pairs_[pair_id];
    if (pair.left_node != 0 || pair.right_node != topo_.n_nodes() - 1) return;
    delivered_ = true;
    outcome_.completion_time_s = now;
    if (werner()) {
      const double s = pair.s_factor;
      const double x_eff = s * (2.0 + s) / 3.0 * pair.x_factor;
      outcome_.end_to_end_state = werner_state(x_eff);
    } else {
      outcome_.end_to_end_state = pair.rho;
    }
    outcome_.fidelity = fidelity(outcome_.end_to_end_state, BellKind::kPsiPlus);
  }

  const ChainTopology& topo_;
  std::span<const RepeaterParams> per_link_;
  SimConfig config_;
  Rng rng_;
  RepeaterParams node_params_;
  std::vector<NodeState> nodes_;
  std::vector<LinkStatus> link_status_;
  std::vector<Pair> pairs_;
  std::priority_queue<Event, std::vector<Event>, EventAfter> queue_;
  bool delivered_ = false;
  RunOutcome outcome_;
};

}  // namespace

RunOutcome simulate_run(const ChainTopology& topology,
                        std::span<const RepeaterParams> per_link,
                        const SimConfig& config, std::uint64_t seed) {
  topology.validate();
  if (per_link.size() != topology.links.size())
    throw std::invalid_argument(
        "simulate_run: per-link parameter count mismatch");
  for (const RepeaterParams& params : per_link) params.validate();
  return ChainRun(topology, per_link, config, seed).run();
}

RunOutcome simulate_run(const ChainTopology& topology,
                        const RepeaterParams& params, const SimConfig& config,
                        std::uint64_t seed) {
  const std::vector<RepeaterParams> per_link(topology.links.size(), params);
  return simulate_run(topology, per_link, config, seed);
}

RunOutcome simulate_run(const ChainTopology& topology,
                        const RepeaterParams& params,
                        const SimConfig& config) {
  return simulate_run(topology, params, config, config.rng_seed);
}

RunStats simulate_batch(const ChainTopology& topology,
                        std::span<const RepeaterParams> per_link,
                        const SimConfig& config, std::int64_t n_runs,
                        std::uint64_t master_seed) {
  if (n_runs < 1)
    throw std::invalid_argument("simulate_batch: n_runs must be >= 1");
  std::vector<double> fidelities(n_runs);
  std::vector<double> times(n_runs);
  for (std::int64_t r = 0; r < n_runs; ++r) {
    const RunOutcome outcome = simulate_run(
        topology, per_link, config,
        derive_seed(master_seed, static_cast<std::uint64_t>(r)));
    fidelities[r] = outcome.fidelity;
    times[r] = outcome.completion_time_s;
  }
  // two-pass around the first sample: a constant sequence yields a mean equal
  // to that constant and a standard error of exactly zero
  const auto mean = [](const std::vector<double>& xs) {
    double sum = 0.0;
    for (double x : xs) sum += x - xs[0];
    return xs[0] + sum / static_cast<double>(xs.size());
  };
  const auto stderr_of = [](const std::vector<double>& xs, double mu) {
    const std::size_t n = xs.size();
    if (n < 2) return 0.0;
    double ss = 0.0;
    for (double x : xs) ss += (x - mu) * (x - mu);
    return std::sqrt(ss / static_cast<double>(n - 1)) /
           std::sqrt(static_cast<double>(n));
  };
  RunStats stats;
  stats.n_runs = n_runs;
  stats.mean_fidelity = mean(fidelities);
  stats.fidelity_stderr = stderr_of(fidelities, stats.mean_fidelity);
  stats.mean_time_s = mean(times);
  stats.rate_hz = 1.0 / stats.mean_time_s;
  const double time_stderr = stderr_of(times, stats.mean_time_s);
  stats.rate_stderr_hz =
      time_stderr / (stats.mean_time_s * stats.mean_time_s);
  return stats;
}

RunStats simulate_batch(const ChainTopology& topology,
                        const RepeaterParams& params, const SimConfig& config,
                        std::int64_t n_runs, std::uint64_t master_seed) {
  const std::vector<RepeaterParams> per_link(topology.links.size(), params);
  return simulate_batch(topology, per_link, config, n_runs, master_seed);
}

}  // namespace qropt::sim
