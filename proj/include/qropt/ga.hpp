#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "qropt/rng.hpp"

namespace qropt::ga {

using Genome = Eigen::VectorXd;

// Per-gene search box, a sub-box of the unit cube.
struct GeneBounds {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  int dimension() const { return static_cast<int>(lower.size()); }
  void validate() const;
  static GeneBounds unit(int dimension);
};

struct GaConfig {
  int population_size = 150;
  int n_parents = 10;
  // percentage mode: derive the parent count from the population size
  bool parents_as_fraction = false;
  double parent_fraction = 0.2;
  double crossover_rate = 0.7;
  double child_mutation_prob = 0.02;
  int n_generations = 200;
  double mutation_width = 0.1;
  GeneBounds bounds;

  int resolved_parent_count() const;
  void validate() const;
};

// population_size genomes, each gene uniform within its bounds
std::vector<Genome> init_population(const GaConfig& config, Rng& rng);

// Selection weights for minimization: f_i = 1 / (cost_i + 1e-12), normalized.
// Infinite costs get probability exactly 0. Throws when every cost is
// infinite or any cost is negative.
std::vector<double> roulette_probabilities(std::span<const double> costs);

// One draw from a probability vector (CDF walk).
int sample_discrete(std::span<const double> probabilities, Rng& rng);

// First `point` genes from a, the rest from b; point in [1, dim - 1].
Genome crossover(const Genome& a, const Genome& b, int point);

// p_m = 0.5 when c_k is above the population mean, otherwise scaled linearly
// between the minimum and the mean. A degenerate mean == min forces 0.5.
double adaptive_mutation_prob(double c_k, double c_mean, double c_min);

// Each gene independently perturbed with probability p_m by uniform
// +-width, clipped to its bounds.
Genome mutate(const Genome& genome, double p_m, const GeneBounds& bounds,
              double width, Rng& rng);

// One evolution step: roulette-selects parents (without replacement), breeds
// crossover_rate * population_size children from random parent pairs, mutates
// parents adaptively and children at the fixed child rate, guarantees the
// previous best survives unmodified, and trims (random non-elite removal) or
// pads (best previous members in ascending cost order) back to size.
std::vector<Genome> next_generation(const std::vector<Genome>& population,
                                    std::span<const double> costs,
                                    const GaConfig& config, Rng& rng);

}  // namespace qropt::ga
