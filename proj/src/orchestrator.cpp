#include "qropt/orchestrator.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <memory>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"
#include "qropt/benchmarks.hpp"
#include "qropt/ini.hpp"

namespace qropt::orch {

namespace {

// Stream tags keep the GA trajectory, fitness evaluations and bound sweeps on
// disjoint deterministic streams under one master seed.
constexpr std::uint64_t kGaStream = 0x4741u;
constexpr std::uint64_t kEvalStream = 0x4556414Cu;
constexpr std::uint64_t kSweepStream = 0x53574550u;

constexpr double kInf = std::numeric_limits<double>::infinity();

using Evaluator = std::function<IndividualRecord(const ga::Genome&, int, int)>;

struct ProblemSetup {
  std::vector<std::string> gene_names;
  ga::GeneBounds default_bounds;
  Evaluator evaluator;
};

ga::GeneBounds bounds_from_lower(const std::vector<double>& lower) {
  ga::GeneBounds bounds;
  bounds.lower = Eigen::Map<const Eigen::VectorXd>(
      lower.data(), static_cast<Eigen::Index>(lower.size()));
  bounds.upper = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(lower.size()));
  return bounds;
}

struct OptimizeContext {
  sim::ChainTopology topology;
  cost::BaselineSet reference;
  std::vector<cost::LinkBaseline> link_baselines;
};

ProblemSetup build_optimize(const RunManifest& m) {
  auto ctx = std::make_shared<OptimizeContext>();
  ctx->topology = sim::ChainTopology::load(m.topology_file);
  ctx->reference = cost::load_baselines(m.baselines_file);
  for (const sim::LinkSpec& link : ctx->topology.links) {
    if (!(link.baseline_f_el > 0.0 && link.baseline_f_el < 1.0) ||
        !(link.baseline_p_suc > 0.0 && link.baseline_p_suc < 1.0))
      throw std::runtime_error(
          "optimize mode needs per-link baselines strictly inside (0, 1)");
    ctx->link_baselines.push_back({link.baseline_f_el, link.baseline_p_suc});
  }

  ProblemSetup setup;
  setup.gene_names = {"f_el", "p_suc", "s_q", "t1", "t2"};
  setup.default_bounds =
      bounds_from_lower(cost::baseline_values(ctx->reference));

  const sim::SimConfig sim_config = m.sim;
  const cost::CostConfig cost_config = m.cost;
  const std::int64_t runs = m.runs_per_individual;
  const std::uint64_t master = m.master_seed;
  setup.evaluator = [ctx, sim_config, cost_config, runs, master](
                        const ga::Genome& genes, int generation,
                        int individual) {
    IndividualRecord rec;
    rec.genes = genes;
    std::array<double, 5> values;
    bool infinite = false;
    for (int g = 0; g < 5; ++g) {
      values[g] = genes[g];
      // a perfect value carries infinite improvement cost; a floor of zero
      // is outside the improvement-factor domain
      infinite = infinite || values[g] >= 1.0 || values[g] <= 0.0;
    }
    NormalizedParams candidate;
    double t1_s = 0.0;
    double t2_s = 0.0;
    if (!infinite) {
      candidate = {values[0], values[1], values[2], values[3], values[4]};
      t1_s = gene_to_time(values[3]);
      t2_s = gene_to_time(values[4]);
      if (t2_s > 2.0 * t1_s) infinite = true;  // unphysical, reject
    }
    if (infinite) {
      rec.cost = kInf;
      return rec;
    }
    const std::vector<RepeaterParams> per_link = cost::propagate_link_baselines(
        ctx->reference, candidate, ctx->link_baselines);
    const sim::RunStats stats = sim::simulate_batch(
        ctx->topology, per_link, sim_config, runs,
        derive_seed(master, kEvalStream, static_cast<std::uint64_t>(generation),
                    static_cast<std::uint64_t>(individual)));
    rec.has_metrics = true;
    rec.mean_fidelity = stats.mean_fidelity;
    rec.fidelity_stderr = stats.fidelity_stderr;
    rec.rate_hz = stats.rate_hz;
    rec.has_physical = true;
    rec.physical = {values[0], values[1], values[2], t1_s, t2_s};
    rec.cost = cost::total_cost(values, ctx->reference, stats.mean_fidelity,
                                stats.rate_hz, cost_config);
    return rec;
  };
  return setup;
}

struct ValidateContext {
  sim::ChainTopology topology;
  cost::BaselineSet baselines;
};

ProblemSetup build_validate(const RunManifest& m) {
  auto ctx = std::make_shared<ValidateContext>();
  ctx->topology = sim::ChainTopology::load(m.topology_file);
  ctx->baselines = cost::BaselineSet{{"f_el", m.werner.baselines.f_b},
                                     {"p_suc", m.werner.baselines.p_suc_b},
                                     {"s_q", m.werner.baselines.s_q_b}};

  ProblemSetup setup;
  setup.gene_names = {"f_el", "p_suc", "s_q"};
  setup.default_bounds =
      bounds_from_lower(cost::baseline_values(ctx->baselines));

  const sim::SimConfig sim_config = m.sim;
  const cost::CostConfig cost_config = m.cost;
  const std::int64_t runs = m.runs_per_individual;
  const std::uint64_t master = m.master_seed;
  setup.evaluator = [ctx, sim_config, cost_config, runs, master](
                        const ga::Genome& genes, int generation,
                        int individual) {
    IndividualRecord rec;
    rec.genes = genes;
    const std::array<double, 3> values = {genes[0], genes[1], genes[2]};
    for (double v : values)
      if (v >= 1.0 || v <= 0.0) {
        rec.cost = kInf;
        return rec;
      }
    RepeaterParams params;
    params.f_el = values[0];
    params.p_suc = values[1];
    params.s_q = values[2];
    params.t1_s = kInf;  // the Werner regime has no memory decoherence
    params.t2_s = kInf;
    const sim::RunStats stats = sim::simulate_batch(
        ctx->topology, params, sim_config, runs,
        derive_seed(master, kEvalStream, static_cast<std::uint64_t>(generation),
                    static_cast<std::uint64_t>(individual)));
    rec.has_metrics = true;
    rec.mean_fidelity = stats.mean_fidelity;
    rec.fidelity_stderr = stats.fidelity_stderr;
    rec.rate_hz = stats.rate_hz;
    rec.has_physical = true;
    rec.physical = params;
    rec.cost = cost::total_cost(values, ctx->baselines, stats.mean_fidelity,
                                stats.rate_hz, cost_config);
    return rec;
  };
  return setup;
}

ProblemSetup build_benchmark(const RunManifest& m) {
  const std::string& fn = m.benchmark.function;
  bench::Box box{};
  int dim = m.benchmark.dimension;
  if (fn == "quartic") {
    box = bench::kQuarticBox;
    if (dim == 0) dim = bench::kQuarticDim;
  } else if (fn == "rastrigin") {
    box = bench::kRastriginBox;
    if (dim == 0) dim = bench::kRastriginDim;
  } else {
    throw std::runtime_error("unknown benchmark function: " + fn);
  }
  if (dim < 2)
    throw std::runtime_error("benchmark dimension must be at least 2");

  ProblemSetup setup;
  for (int g = 0; g < dim; ++g) {
    char name[16];
    snprintf(name, sizeof name, "g%02d", g);
    setup.gene_names.emplace_back(name);
  }
  setup.default_bounds = ga::GeneBounds::unit(dim);

  const bool noisy = m.benchmark.noise && fn == "quartic";
  const bool is_quartic = fn == "quartic";
  const std::int64_t runs = m.runs_per_individual;
  const std::uint64_t master = m.master_seed;
  setup.evaluator = [box, dim, noisy, is_quartic, runs, master](
                        const ga::Genome& genes, int generation,
                        int individual) {
    IndividualRecord rec;
    rec.genes = genes;
    std::vector<double> x(dim);
    for (int g = 0; g < dim; ++g)
      x[g] = box.lo + (box.hi - box.lo) * genes[g];
    double value = 0.0;
    if (noisy) {
      Rng rng(derive_seed(master, kEvalStream,
                          static_cast<std::uint64_t>(generation),
                          static_cast<std::uint64_t>(individual)));
      double sum = 0.0;
      for (std::int64_t r = 0; r < runs; ++r) sum += bench::quartic(x, rng);
      value = sum / static_cast<double>(runs);
    } else {
      value = is_quartic ? bench::quartic(x) : bench::rastrigin(x);
    }
    // the noisy mean can dip below zero near the optimum; roulette weights
    // need nonnegative costs
    rec.cost = std::max(value, 0.0);
    return rec;
  };
  return setup;
}

ProblemSetup build_problem(const RunManifest& m) {
  switch (m.mode) {
    case RunMode::kOptimize: return build_optimize(m);
    case RunMode::kValidate: return build_validate(m);
    case RunMode::kBenchmark: return build_benchmark(m);
    default:
      throw std::runtime_error("mode has no optimization problem");
  }
}

int gene_index(const std::vector<std::string>& names, const std::string& gene) {
  const auto it = std::find(names.begin(), names.end(), gene);
  if (it == names.end())
    throw std::runtime_error("unknown gene name: " + gene);
  return static_cast<int>(it - names.begin());
}

std::string csv_header(const OptimizationHistory& history) {
  std::string line = "generation,individual";
  for (const std::string& name : history.gene_names) line += ",g_" + name;
  if (history.mode != RunMode::kBenchmark) {
    line += ",f_el,p_suc,s_q";
    if (history.gene_names.size() == 5) line += ",t1_s,t2_s";
    line += ",mean_fidelity,fidelity_stderr,rate_hz";
  }
  line += ",cost\n";
  return line;
}

std::string csv_rows(const OptimizationHistory& history,
                     const GenerationRecord& record) {
  std::string out;
  for (std::size_t i = 0; i < record.individuals.size(); ++i) {
    const IndividualRecord& ind = record.individuals[i];
    out += std::to_string(record.index) + "," + std::to_string(i);
    for (int g = 0; g < ind.genes.size(); ++g)
      out += "," + format_double(ind.genes[g]);
    if (history.mode != RunMode::kBenchmark) {
      if (ind.has_physical) {
        out += "," + format_double(ind.physical.f_el);
        out += "," + format_double(ind.physical.p_suc);
        out += "," + format_double(ind.physical.s_q);
        if (history.gene_names.size() == 5) {
          out += "," + format_double(ind.physical.t1_s);
          out += "," + format_double(ind.physical.t2_s);
        }
      } else {
        out += history.gene_names.size() == 5 ? ",,,,," : ",,,";
      }
      if (ind.has_metrics) {
        out += "," + format_double(ind.mean_fidelity);
        out += "," + format_double(ind.fidelity_stderr);
        out += "," + format_double(ind.rate_hz);
      } else {
        out += ",,,";
      }
    }
    out += "," + format_double(ind.cost) + "\n";
  }
  return out;
}

void write_manifest_echo(const RunManifest& m, const std::filesystem::path& to) {
  std::ofstream out(to);
  if (!out) throw std::runtime_error("cannot write " + to.string());
  out << "[run]\n";
  out << "mode = " << mode_name(m.mode) << "\n";
  if (!m.topology_file.empty())
    out << "topology = " << m.topology_file.string() << "\n";
  if (!m.baselines_file.empty())
    out << "baselines = " << m.baselines_file.string() << "\n";
  out << "seed = " << m.master_seed << "\n";
  out << "jobs = " << m.jobs << "\n";
  out << "runs_per_individual = " << m.runs_per_individual << "\n";
  out << "stagnation_window = " << m.stagnation_window << "\n";
  out << "noise_mode = "
      << (m.sim.noise_mode == sim::NoiseMode::kWerner ? "werner" : "full")
      << "\n";
  out << "dephasing_scope = "
      << (m.sim.dephasing_scope == sim::DephasingScope::kContinuous
              ? "continuous"
              : "attempt-windows")
      << "\n";
  out << "\n[cost]\n";
  out << "f_min = " << format_double(m.cost.f_min) << "\n";
  out << "r_min_hz = " << format_double(m.cost.r_min_hz) << "\n";
  out << "w1 = " << format_double(m.cost.w1) << "\n";
  out << "w2 = " << format_double(m.cost.w2) << "\n";
  out << "w3 = " << format_double(m.cost.w3) << "\n";
  out << "average_parameter_cost = "
      << (m.cost.average_parameter_cost ? "true" : "false") << "\n";
  out << "\n[ga]\n";
  out << "population_size = " << m.ga.population_size << "\n";
  out << "n_parents = " << m.ga.resolved_parent_count() << "\n";
  out << "crossover_rate = " << format_double(m.ga.crossover_rate) << "\n";
  out << "child_mutation_prob = " << format_double(m.ga.child_mutation_prob)
      << "\n";
  out << "n_generations = " << m.ga.n_generations << "\n";
  out << "mutation_width = " << format_double(m.ga.mutation_width) << "\n";
  if (m.mode == RunMode::kValidate) {
    out << "\n[werner]\n";
    out << "baseline_f = " << format_double(m.werner.baselines.f_b) << "\n";
    out << "baseline_p_suc = " << format_double(m.werner.baselines.p_suc_b)
        << "\n";
    out << "baseline_s_q = " << format_double(m.werner.baselines.s_q_b)
        << "\n";
    out << "auto_bounds = " << (m.werner.auto_bounds ? "true" : "false")
        << "\n";
  }
  if (m.mode == RunMode::kBenchmark) {
    out << "\n[benchmark]\n";
    out << "function = " << m.benchmark.function << "\n";
    out << "dimension = " << m.benchmark.dimension << "\n";
    out << "noise = " << (m.benchmark.noise ? "true" : "false") << "\n";
  }
  if (m.mode == RunMode::kSweep) {
    out << "\n[sweep]\n";
    out << "parameter = " << m.sweep.parameter << "\n";
    out << "metric = " << m.sweep.metric << "\n";
    out << "threshold = " << format_double(m.sweep.threshold) << "\n";
    out << "runs = " << m.sweep.runs << "\n";
  }
  if (m.ga.bounds.dimension() > 0 && m.mode != RunMode::kSweep) {
    out << "\n[bounds]\n";
    // names are re-derivable from the mode; bounds echoed positionally
    for (int g = 0; g < m.ga.bounds.dimension(); ++g)
      out << "gene" << g << " = " << format_double(m.ga.bounds.lower[g])
          << ", " << format_double(m.ga.bounds.upper[g]) << "\n";
  }
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

RunMode parse_mode(const std::string& name) {
  if (name == "optimize") return RunMode::kOptimize;
  if (name == "sweep") return RunMode::kSweep;
  if (name == "validate") return RunMode::kValidate;
  if (name == "benchmark") return RunMode::kBenchmark;
  throw std::runtime_error("unknown mode: " + name);
}

std::string mode_name(RunMode mode) {
  switch (mode) {
    case RunMode::kOptimize: return "optimize";
    case RunMode::kSweep: return "sweep";
    case RunMode::kValidate: return "validate";
    case RunMode::kBenchmark: return "benchmark";
  }
  return "unknown";
}

std::optional<BestSolution> OptimizationHistory::best() const {
  std::optional<BestSolution> found;
  for (const GenerationRecord& gen : generations) {
    if (gen.individuals.empty()) continue;
    const IndividualRecord& ind = gen.individuals[gen.best_index];
    if (!found || ind.cost < found->cost) {
      found = BestSolution{gen.index,        gen.best_index, ind.cost,
                           ind.genes,        ind.has_physical,
                           ind.physical};
    }
  }
  return found;
}

RunManifest RunManifest::load(const std::filesystem::path& config_path) {
  const IniFile ini = IniFile::load(config_path);
  const std::filesystem::path base = config_path.parent_path();
  const auto resolve_path = [&](const std::string& p) {
    const std::filesystem::path path(p);
    return path.is_absolute() ? path : base / path;
  };

  RunManifest m;
  m.mode = parse_mode(ini.get_or("run", "mode", "optimize"));
  if (ini.has("run", "topology"))
    m.topology_file = resolve_path(ini.get("run", "topology"));
  if (ini.has("run", "baselines"))
    m.baselines_file = resolve_path(ini.get("run", "baselines"));
  if (ini.has("run", "out")) m.out_dir = ini.get("run", "out");
  m.master_seed =
      static_cast<std::uint64_t>(ini.get_int_or("run", "seed", 0));
  m.jobs = static_cast<int>(ini.get_int_or("run", "jobs", 1));
  m.runs_per_individual = ini.get_int_or("run", "runs_per_individual", 100);
  m.stagnation_window =
      static_cast<int>(ini.get_int_or("run", "stagnation_window", 0));

  const std::string default_noise =
      m.mode == RunMode::kValidate ? "werner" : "full";
  const std::string noise = ini.get_or("run", "noise_mode", default_noise);
  if (noise == "werner")
    m.sim.noise_mode = sim::NoiseMode::kWerner;
  else if (noise == "full")
    m.sim.noise_mode = sim::NoiseMode::kFull;
  else
    throw std::runtime_error("unknown noise_mode: " + noise);
  const std::string scope =
      ini.get_or("run", "dephasing_scope", "attempt-windows");
  if (scope == "continuous")
    m.sim.dephasing_scope = sim::DephasingScope::kContinuous;
  else if (scope == "attempt-windows")
    m.sim.dephasing_scope = sim::DephasingScope::kAttemptWindows;
  else
    throw std::runtime_error("unknown dephasing_scope: " + scope);

  m.cost.f_min = ini.get_double_or("cost", "f_min", 0.7);
  m.cost.r_min_hz = ini.get_double_or("cost", "r_min_hz", 1.0);
  m.cost.w1 = ini.get_double_or("cost", "w1", 25000.0);
  m.cost.w2 = ini.get_double_or("cost", "w2", 25000.0);
  m.cost.w3 = ini.get_double_or("cost", "w3", 1.0);
  m.cost.average_parameter_cost =
      ini.get_bool_or("cost", "average_parameter_cost", false);

  m.ga.population_size =
      static_cast<int>(ini.get_int_or("ga", "population_size", 150));
  m.ga.n_parents = static_cast<int>(ini.get_int_or("ga", "n_parents", 10));
  m.ga.parents_as_fraction =
      ini.get_bool_or("ga", "parents_as_fraction", false);
  m.ga.parent_fraction = ini.get_double_or("ga", "parent_fraction", 0.2);
  m.ga.crossover_rate = ini.get_double_or("ga", "crossover_rate", 0.7);
  m.ga.child_mutation_prob =
      ini.get_double_or("ga", "child_mutation_prob", 0.02);
  m.ga.n_generations =
      static_cast<int>(ini.get_int_or("ga", "n_generations", 200));
  m.ga.mutation_width = ini.get_double_or("ga", "mutation_width", 0.1);

  for (const std::string& gene : ini.keys("bounds")) {
    const std::vector<std::string> parts = split(ini.get("bounds", gene), ',');
    if (parts.size() != 2)
      throw std::runtime_error("bounds for " + gene + " must be 'lo, hi'");
    m.explicit_bounds.push_back(
        {gene, std::stod(parts[0]), std::stod(parts[1])});
  }

  m.werner.baselines.f_b = ini.get_double_or("werner", "baseline_f", 0.5);
  m.werner.baselines.p_suc_b =
      ini.get_double_or("werner", "baseline_p_suc", 1e-10);
  m.werner.baselines.s_q_b = ini.get_double_or("werner", "baseline_s_q", 0.5);
  m.werner.auto_bounds = ini.get_bool_or("werner", "auto_bounds", true);

  m.sweep.parameter = ini.get_or("sweep", "parameter", "f_el");
  m.sweep.metric = ini.get_or("sweep", "metric", "fidelity");
  m.sweep.threshold = ini.get_double_or("sweep", "threshold", 0.7);
  m.sweep.runs = ini.get_int_or("sweep", "runs", 100);

  m.benchmark.function = ini.get_or("benchmark", "function", "rastrigin");
  m.benchmark.dimension =
      static_cast<int>(ini.get_int_or("benchmark", "dimension", 0));
  m.benchmark.noise = ini.get_bool_or("benchmark", "noise", false);
  return m;
}

RunManifest resolve(const RunManifest& manifest) {
  RunManifest m = manifest;
  if (m.runs_per_individual < 1)
    throw std::runtime_error("runs_per_individual must be at least 1");
  if (m.mode == RunMode::kSweep) return m;
  if (m.ga.bounds.dimension() > 0) {
    m.ga.bounds.validate();
    return m;
  }

  const ProblemSetup setup = build_problem(m);
  ga::GeneBounds bounds = setup.default_bounds;

  if (m.mode == RunMode::kValidate && m.werner.auto_bounds &&
      m.explicit_bounds.empty()) {
    // sensitivity-analysis preprocessing: bisect each parameter against the
    // targets with everything else perfect and floor the search box there
    const sim::ChainTopology topology =
        sim::ChainTopology::load(m.topology_file);
    const struct {
      const char* gene;
      const char* metric;
      double threshold;
    } axes[] = {{"f_el", "fidelity", m.cost.f_min},
                {"p_suc", "rate", m.cost.r_min_hz},
                {"s_q", "fidelity", m.cost.f_min}};
    for (std::size_t axis = 0; axis < 3; ++axis) {
      const SweepResult res = sensitivity_sweep(
          topology, axes[axis].metric, axes[axis].threshold, axes[axis].gene,
          m.sim, m.runs_per_individual,
          derive_seed(m.master_seed, kSweepStream, axis));
      const int g = gene_index(setup.gene_names, axes[axis].gene);
      bounds.lower[g] = std::max(bounds.lower[g], res.crossing);
    }
  }

  for (const BoundsOverride& entry : m.explicit_bounds) {
    const int g = gene_index(setup.gene_names, entry.gene);
    bounds.lower[g] = entry.lower;
    bounds.upper[g] = entry.upper;
  }
  bounds.validate();
  m.ga.bounds = bounds;
  return m;
}

void parallel_for(int n, int jobs, const std::function<void(int)>& fn) {
  jobs = std::max(1, std::min(jobs, n));
  if (jobs <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  const auto worker = [&] {
    while (true) {
      const int i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> threads;
  threads.reserve(jobs);
  for (int t = 0; t < jobs; ++t) threads.emplace_back(worker);
  for (std::thread& t : threads) t.join();
  if (error) std::rethrow_exception(error);
}

OptimizationHistory run_optimization(const RunManifest& raw) {
  const RunManifest m = resolve(raw);
  if (m.mode == RunMode::kSweep)
    throw std::runtime_error("run_optimization: sweep mode has no GA loop");
  m.ga.validate();
  const ProblemSetup setup = build_problem(m);

  OptimizationHistory history;
  history.mode = m.mode;
  history.gene_names = setup.gene_names;

  std::ofstream csv;
  if (!m.out_dir.empty()) {
    std::filesystem::create_directories(m.out_dir);
    csv.open(m.out_dir / "history.csv", std::ios::trunc);
    if (!csv)
      throw std::runtime_error("cannot write history.csv in " +
                               m.out_dir.string());
    csv << csv_header(history);
    csv.flush();
  }

  Rng ga_rng(derive_seed(m.master_seed, kGaStream));
  std::vector<ga::Genome> population = ga::init_population(m.ga, ga_rng);

  double best_so_far = kInf;
  int stale_generations = 0;
  for (int generation = 0; generation < m.ga.n_generations; ++generation) {
    GenerationRecord record;
    record.index = generation;
    record.individuals.resize(population.size());
    parallel_for(static_cast<int>(population.size()), m.jobs, [&](int i) {
      record.individuals[i] = setup.evaluator(population[i], generation, i);
    });

    record.best_index = 0;
    double sum = 0.0;
    for (std::size_t i = 0; i < record.individuals.size(); ++i) {
      const double c = record.individuals[i].cost;
      sum += c;
      if (c < record.individuals[record.best_index].cost)
        record.best_index = static_cast<int>(i);
    }
    record.best_cost = record.individuals[record.best_index].cost;
    record.mean_cost = sum / static_cast<double>(record.individuals.size());

    if (csv.is_open()) {
      csv << csv_rows(history, record);
      csv.flush();
    }
    history.generations.push_back(std::move(record));

    const GenerationRecord& done = history.generations.back();
    if (done.best_cost < best_so_far) {
      best_so_far = done.best_cost;
      stale_generations = 0;
    } else {
      ++stale_generations;
    }
    if (m.stagnation_window > 0 && stale_generations >= m.stagnation_window)
      break;

    if (generation + 1 < m.ga.n_generations) {
      std::vector<double> costs(population.size());
      for (std::size_t i = 0; i < population.size(); ++i)
        costs[i] = done.individuals[i].cost;
      population = ga::next_generation(population, costs, m.ga, ga_rng);
    }
  }
  return history;
}

SweepResult sensitivity_sweep(const sim::ChainTopology& topology,
                              const std::string& metric, double threshold,
                              const std::string& parameter,
                              const sim::SimConfig& sim_config,
                              std::int64_t runs, std::uint64_t seed,
                              int iterations) {
  topology.validate();
  if (metric != "fidelity" && metric != "rate")
    throw std::runtime_error("sensitivity_sweep: unknown metric " + metric);
  const bool is_time = parameter == "t1" || parameter == "t2";
  if (parameter != "f_el" && parameter != "p_suc" && parameter != "s_q" &&
      !is_time)
    throw std::runtime_error("sensitivity_sweep: unknown parameter " +
                             parameter);

  const auto params_for = [&](double gene) {
    RepeaterParams p;
    p.f_el = 1.0;
    p.p_suc = 1.0;
    p.s_q = 1.0;
    p.t1_s = kInf;
    p.t2_s = kInf;
    if (parameter == "f_el") p.f_el = gene;
    if (parameter == "p_suc") p.p_suc = std::max(gene, 1e-9);
    if (parameter == "s_q") p.s_q = gene;
    if (parameter == "t1")
      p.t1_s = gene >= 1.0 ? kInf : gene_to_time(std::max(gene, 1e-9));
    if (parameter == "t2")
      p.t2_s = gene >= 1.0 ? kInf : gene_to_time(std::max(gene, 1e-9));
    return p;
  };
  int probe = 0;
  const auto response = [&](double gene) {
    const sim::RunStats stats =
        sim::simulate_batch(topology, params_for(gene), sim_config, runs,
                            derive_seed(seed, static_cast<std::uint64_t>(probe++)));
    return metric == "fidelity" ? stats.mean_fidelity : stats.rate_hz;
  };

  double lo = 0.0;
  double hi = 1.0;
  const double r_hi = response(hi);
  if (r_hi < threshold)
    throw std::runtime_error(
        "sensitivity_sweep: threshold unreachable even at the perfect value");
  const double r_lo = response(lo);
  if (r_lo > r_hi)
    throw std::runtime_error(
        "sensitivity_sweep: response is not monotone in " + parameter);

  SweepResult result;
  result.parameter = parameter;
  result.metric = metric;
  result.threshold = threshold;
  result.iterations = iterations;
  if (r_lo >= threshold) {
    result.crossing = lo;
    result.bracket_lo = lo;
    result.bracket_hi = lo;
    return result;
  }
  for (int it = 0; it < iterations; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (response(mid) >= threshold)
      hi = mid;
    else
      lo = mid;
  }
  result.crossing = hi;
  result.bracket_lo = lo;
  result.bracket_hi = hi;
  return result;
}

ga::GeneBounds propagate_bounds(const OptimizationHistory& previous,
                                const sim::ChainTopology& previous_topology,
                                const sim::ChainTopology& new_topology,
                                ga::GeneBounds bounds) {
  previous_topology.validate();
  new_topology.validate();
  if (new_topology.n_repeaters() < previous_topology.n_repeaters())
    throw std::invalid_argument(
        "propagate_bounds: the new chain must have at least as many repeaters");
  const std::optional<BestSolution> best = previous.best();
  if (!best)
    throw std::invalid_argument("propagate_bounds: empty history");
  const int g = gene_index(previous.gene_names, "p_suc");
  if (bounds.dimension() != static_cast<int>(previous.gene_names.size()))
    throw std::invalid_argument(
        "propagate_bounds: bounds do not match the gene layout");
  // a longer chain needs at least the success probability that met the rate
  // target before; fidelity-side genes are deliberately left unbounded
  bounds.lower[g] = std::max(bounds.lower[g], best->genes[g]);
  bounds.validate();
  return bounds;
}

void emit_results(const OptimizationHistory& history,
                  const RunManifest& manifest,
                  const std::filesystem::path& directory) {
  std::filesystem::create_directories(directory);

  std::ofstream csv(directory / "history.csv", std::ios::trunc);
  if (!csv) throw std::runtime_error("cannot write history.csv");
  csv << csv_header(history);
  for (const GenerationRecord& record : history.generations)
    csv << csv_rows(history, record);
  csv.close();

  nlohmann::ordered_json summary;
  summary["mode"] = mode_name(history.mode);
  summary["master_seed"] = manifest.master_seed;
  summary["population_size"] = manifest.ga.population_size;
  summary["n_generations"] = manifest.ga.n_generations;
  summary["runs_per_individual"] = manifest.runs_per_individual;
  summary["gene_names"] = history.gene_names;
  if (manifest.ga.bounds.dimension() ==
      static_cast<int>(history.gene_names.size())) {
    nlohmann::ordered_json bounds;
    for (std::size_t g = 0; g < history.gene_names.size(); ++g)
      bounds[history.gene_names[g]] = {manifest.ga.bounds.lower[g],
                                       manifest.ga.bounds.upper[g]};
    summary["bounds"] = bounds;
  }
  const std::optional<BestSolution> best = history.best();
  if (best) {
    nlohmann::ordered_json entry;
    entry["generation"] = best->generation;
    entry["individual"] = best->individual;
    entry["cost"] = best->cost;
    nlohmann::ordered_json genes;
    for (std::size_t g = 0; g < history.gene_names.size(); ++g)
      genes[history.gene_names[g]] = best->genes[static_cast<int>(g)];
    entry["genes"] = genes;
    if (best->has_physical) {
      nlohmann::ordered_json phys;
      phys["f_el"] = best->physical.f_el;
      phys["p_suc"] = best->physical.p_suc;
      phys["s_q"] = best->physical.s_q;
      if (history.gene_names.size() == 5) {
        phys["t1_s"] = best->physical.t1_s;
        phys["t2_s"] = best->physical.t2_s;
      }
      entry["physical"] = phys;
    }
    summary["best"] = entry;
  } else {
    summary["best"] = nullptr;
  }
  nlohmann::ordered_json trace = nlohmann::ordered_json::array();
  for (const GenerationRecord& record : history.generations) {
    nlohmann::ordered_json row;
    row["generation"] = record.index;
    row["best_cost"] = record.best_cost;
    row["mean_cost"] = record.mean_cost;
    trace.push_back(row);
  }
  summary["trace"] = trace;
  std::ofstream json_out(directory / "summary.json", std::ios::trunc);
  if (!json_out) throw std::runtime_error("cannot write summary.json");
  json_out << summary.dump(2) << "\n";
  json_out.close();

  write_manifest_echo(manifest, directory / "manifest.ini");
}

int run_manifest(const RunManifest& manifest) {
  const RunManifest m = resolve(manifest);
  if (m.mode == RunMode::kSweep) {
    const sim::ChainTopology topology =
        sim::ChainTopology::load(m.topology_file);
    const SweepResult result = sensitivity_sweep(
        topology, m.sweep.metric, m.sweep.threshold, m.sweep.parameter, m.sim,
        m.sweep.runs, derive_seed(m.master_seed, kSweepStream, 0));
    std::printf("sweep %s against %s >= %s: crossing at %s (bracket [%s, %s])\n",
                result.parameter.c_str(), result.metric.c_str(),
                format_double(result.threshold).c_str(),
                format_double(result.crossing).c_str(),
                format_double(result.bracket_lo).c_str(),
                format_double(result.bracket_hi).c_str());
    if (!m.out_dir.empty()) {
      std::filesystem::create_directories(m.out_dir);
      nlohmann::ordered_json out;
      out["parameter"] = result.parameter;
      out["metric"] = result.metric;
      out["threshold"] = result.threshold;
      out["crossing"] = result.crossing;
      out["bracket"] = {result.bracket_lo, result.bracket_hi};
      out["iterations"] = result.iterations;
      out["search_interval"] = {result.crossing, 1.0};
      std::ofstream file(m.out_dir / "sweep.json", std::ios::trunc);
      file << out.dump(2) << "\n";
      write_manifest_echo(m, m.out_dir / "manifest.ini");
    }
    return 0;
  }

  const OptimizationHistory history = run_optimization(m);
  if (!m.out_dir.empty()) emit_results(history, m, m.out_dir);
  const std::optional<BestSolution> best = history.best();
  if (best) {
    std::printf("best cost %s at generation %d individual %d\n",
                format_double(best->cost).c_str(), best->generation,
                best->individual);
    for (std::size_t g = 0; g < history.gene_names.size(); ++g)
      std::printf("  %s = %s\n", history.gene_names[g].c_str(),
                  format_double(best->genes[static_cast<int>(g)]).c_str());
  } else {
    std::printf("no generations were evaluated\n");
  }
  return 0;
}

}  // namespace qropt::orch
