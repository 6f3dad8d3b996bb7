#include "qropt/ga.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace qropt::ga {

namespace {
constexpr double kRouletteEpsilon = 1e-12;
}

void GeneBounds::validate() const {
  if (lower.size() == 0 || lower.size() != upper.size())
    throw std::invalid_argument("GeneBounds: empty or mismatched bounds");
  for (int i = 0; i < lower.size(); ++i) {
    if (!(lower[i] >= 0.0 && upper[i] <= 1.0 && lower[i] <= upper[i]))
      throw std::invalid_argument(
          "GeneBounds: each gene box must satisfy 0 <= lo <= hi <= 1");
  }
}

GeneBounds GeneBounds::unit(int dimension) {
  GeneBounds bounds;
  bounds.lower = Eigen::VectorXd::Zero(dimension);
  bounds.upper = Eigen::VectorXd::Ones(dimension);
  return bounds;
}

int GaConfig::resolved_parent_count() const {
  if (parents_as_fraction)
    return std::max(
        1, static_cast<int>(std::lround(parent_fraction * population_size)));
  return n_parents;
}

void GaConfig::validate() const {
  bounds.validate();
  if (population_size < 1)
    throw std::invalid_argument("GaConfig: population_size must be >= 1");
  if (resolved_parent_count() < 1 ||
      resolved_parent_count() > population_size)
    throw std::invalid_argument(
        "GaConfig: parent count must be in [1, population_size]");
  if (!(crossover_rate >= 0.0 && crossover_rate <= 1.0))
    throw std::invalid_argument("GaConfig: crossover_rate must be in [0, 1]");
  if (!(child_mutation_prob >= 0.0 && child_mutation_prob <= 1.0))
    throw std::invalid_argument(
        "GaConfig: child_mutation_prob must be in [0, 1]");
  if (n_generations < 1)
    throw std::invalid_argument("GaConfig: n_generations must be >= 1");
  if (!(mutation_width >= 0.0))
    throw std::invalid_argument("GaConfig: mutation_width must be >= 0");
}

std::vector<Genome> init_population(const GaConfig& config, Rng& rng) {
  config.validate();
  const int dim = config.bounds.dimension();
  std::vector<Genome> population(config.population_size, Genome(dim));
  for (Genome& genome : population)
    for (int g = 0; g < dim; ++g)
      genome[g] =
          rng.uniform(config.bounds.lower[g], config.bounds.upper[g]);
  return population;
}

std::vector<double> roulette_probabilities(std::span<const double> costs) {
  if (costs.empty())
    throw std::invalid_argument("roulette_probabilities: no costs");
  std::vector<double> weights(costs.size());
  double total = 0.0;
  for (std::size_t i = 0; i < costs.size(); ++i) {
    const double c = costs[i];
    if (std::isnan(c) || c < 0.0)
      throw std::invalid_argument(
          "roulette_probabilities: costs must be nonnegative");
    weights[i] = std::isinf(c) ? 0.0 : 1.0 / (c + kRouletteEpsilon);
    total += weights[i];
  }
  if (total <= 0.0)
    throw std::invalid_argument(
        "roulette_probabilities: every individual has infinite cost");
  for (double& w : weights) w /= total;
  return weights;
}

int sample_discrete(std::span<const double> probabilities, Rng& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  int last_positive = -1;
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    if (probabilities[i] <= 0.0) continue;
    acc += probabilities[i];
    last_positive = static_cast<int>(i);
    if (u < acc) return last_positive;
  }
  if (last_positive < 0)
    throw std::invalid_argument("sample_discrete: no positive probability");
  return last_positive;
}

Genome crossover(const Genome& a, const Genome& b, int point) {
  if (a.size() != b.size())
    throw std::invalid_argument("crossover: parents differ in size");
  if (point < 1 || point >= a.size())
    throw std::invalid_argument("crossover: point must be in [1, genes - 1]");
  Genome child(a.size());
  child.head(point) = a.head(point);
  child.tail(a.size() - point) = b.tail(a.size() - point);
  return child;
}

double adaptive_mutation_prob(double c_k, double c_mean, double c_min) {
  if (c_min > c_mean)
    throw std::invalid_argument("adaptive_mutation_prob: c_min > c_mean");
  if (c_k > c_mean) return 0.5;
  if (c_mean == c_min) return 0.5;  // uniform population, keep exploring
  return 0.5 * (c_k - c_min) / (c_mean - c_min);
}

Genome mutate(const Genome& genome, double p_m, const GeneBounds& bounds,
              double width, Rng& rng) {
  if (!(p_m >= 0.0 && p_m <= 1.0))
    throw std::invalid_argument("mutate: p_m must be in [0, 1]");
  if (genome.size() != bounds.dimension())
    throw std::invalid_argument("mutate: genome/bounds size mismatch");
  Genome out = genome;
  for (int g = 0; g < out.size(); ++g) {
    if (rng.uniform() >= p_m) continue;
    const double kicked = out[g] + rng.uniform(-width, width);
    out[g] = std::clamp(kicked, bounds.lower[g], bounds.upper[g]);
  }
  return out;
}

std::vector<Genome> next_generation(const std::vector<Genome>& population,
                                    std::span<const double> costs,
                                    const GaConfig& config, Rng& rng) {
  config.validate();
  const int pop_size = config.population_size;
  if (static_cast<int>(population.size()) != pop_size ||
      costs.size() != population.size())
    throw std::invalid_argument(
        "next_generation: population/cost sizes must match the config");
  const int n_parents = config.resolved_parent_count();

  // population statistics over finite costs
  int best_index = -1;
  double c_min = std::numeric_limits<double>::infinity();
  double finite_sum = 0.0;
  int finite_count = 0;
  for (int i = 0; i < pop_size; ++i) {
    if (std::isinf(costs[i])) continue;
    finite_sum += costs[i];
    ++finite_count;
    if (costs[i] < c_min) {
      c_min = costs[i];
      best_index = i;
    }
  }
  if (best_index < 0)
    throw std::invalid_argument(
        "next_generation: every individual has infinite cost");
  // the clamp absorbs summation rounding when every finite cost is equal
  const double c_mean = std::max(finite_sum / finite_count, c_min);

  // roulette selection without replacement
  std::vector<double> weights(pop_size);
  for (int i = 0; i < pop_size; ++i)
    weights[i] =
        std::isinf(costs[i]) ? 0.0 : 1.0 / (costs[i] + kRouletteEpsilon);
  std::vector<int> available(pop_size);
  std::iota(available.begin(), available.end(), 0);
  std::vector<int> parent_indices;
  parent_indices.reserve(n_parents);
  for (int k = 0; k < n_parents; ++k) {
    double total = 0.0;
    for (int idx : available) total += weights[idx];
    std::size_t chosen_slot = available.size() - 1;
    if (total > 0.0) {
      const double u = rng.uniform() * total;
      double acc = 0.0;
      for (std::size_t slot = 0; slot < available.size(); ++slot) {
        acc += weights[available[slot]];
        if (u < acc) {
          chosen_slot = slot;
          break;
        }
      }
    }
    parent_indices.push_back(available[chosen_slot]);
    available.erase(available.begin() +
                    static_cast<std::ptrdiff_t>(chosen_slot));
  }

  std::vector<Genome> parents;
  parents.reserve(n_parents);
  std::vector<double> parent_costs;
  parent_costs.reserve(n_parents);
  for (int idx : parent_indices) {
    parents.push_back(population[idx]);
    parent_costs.push_back(costs[idx]);
  }

  // children from random distinct parent pairs
  const int n_children = static_cast<int>(
      std::lround(config.crossover_rate * config.population_size));
  const int dim = config.bounds.dimension();
  std::vector<Genome> children;
  children.reserve(n_children);
  for (int c = 0; c < n_children; ++c) {
    if (n_parents < 2 || dim < 2) {
      children.push_back(parents[rng.uniform_index(n_parents)]);
      continue;
    }
    const int a = static_cast<int>(rng.uniform_index(n_parents));
    int b = static_cast<int>(rng.uniform_index(n_parents - 1));
    if (b >= a) ++b;
    const int point = 1 + static_cast<int>(rng.uniform_index(dim - 1));
    children.push_back(crossover(parents[a], parents[b], point));
  }

  std::vector<Genome> next;
  next.reserve(pop_size + 1);
  for (int k = 0; k < n_parents; ++k) {
    const double p_m =
        std::isinf(parent_costs[k])
            ? 0.5
            : adaptive_mutation_prob(parent_costs[k], c_mean, c_min);
    next.push_back(
        mutate(parents[k], p_m, config.bounds, config.mutation_width, rng));
  }
  for (Genome& child : children)
    next.push_back(mutate(child, config.child_mutation_prob, config.bounds,
                          config.mutation_width, rng));

  // elitism: the previous best survives gene-identical
  const Genome& elite = population[best_index];
  int elite_pos = -1;
  for (std::size_t i = 0; i < next.size(); ++i)
    if (next[i] == elite) {
      elite_pos = static_cast<int>(i);
      break;
    }
  if (elite_pos < 0) {
    next.insert(next.begin(), elite);
    elite_pos = 0;
  }

  if (static_cast<int>(next.size()) > pop_size) {
    // random removal among non-elite members
    while (static_cast<int>(next.size()) > pop_size) {
      std::size_t doomed = rng.uniform_index(next.size() - 1);
      if (static_cast<int>(doomed) >= elite_pos) ++doomed;
      next.erase(next.begin() + static_cast<std::ptrdiff_t>(doomed));
      if (static_cast<int>(doomed) < elite_pos) --elite_pos;
    }
  } else if (static_cast<int>(next.size()) < pop_size) {
    // pad with the previous generation in ascending cost order
    std::vector<int> order(pop_size);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      if (costs[a] != costs[b]) return costs[a] < costs[b];
      return a < b;
    });
    std::size_t rank = 0;
    while (static_cast<int>(next.size()) < pop_size) {
      next.push_back(population[order[rank % order.size()]]);
      ++rank;
    }
  }
  return next;
}

}  // namespace qropt::ga
