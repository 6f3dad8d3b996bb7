#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

#include "qropt/ga.hpp"

using namespace qropt;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

ga::GaConfig small_config(int dim, int pop) {
  ga::GaConfig config;
  config.population_size = pop;
  config.n_parents = std::min(10, pop);
  config.bounds = ga::GeneBounds::unit(dim);
  return config;
}

// deterministic toy cost: distance to a point inside the unit box
double sphere(const ga::Genome& g) {
  return (g - ga::Genome::Constant(g.size(), 0.25)).squaredNorm();
}

}  // namespace

TEST_CASE("init_population") {
  ga::GaConfig config = small_config(5, 150);
  Rng rng_a(1);
  Rng rng_b(1);
  const auto pop_a = ga::init_population(config, rng_a);
  const auto pop_b = ga::init_population(config, rng_b);
  REQUIRE(pop_a.size() == 150);
  for (std::size_t i = 0; i < pop_a.size(); ++i) {
    CHECK(pop_a[i] == pop_b[i]);  // same seed, same population
    for (int g = 0; g < 5; ++g) {
      CHECK(pop_a[i][g] >= 0.0);
      CHECK(pop_a[i][g] <= 1.0);
    }
  }

  // collapsed bounds produce identical individuals
  config.bounds.lower = Eigen::VectorXd::Constant(5, 0.42);
  config.bounds.upper = Eigen::VectorXd::Constant(5, 0.42);
  Rng rng_c(9);
  for (const auto& genome : ga::init_population(config, rng_c))
    CHECK(genome == Eigen::VectorXd::Constant(5, 0.42));
}

TEST_CASE("roulette_probabilities") {
  const std::array<double, 4> equal = {3.0, 3.0, 3.0, 3.0};
  for (double p : ga::roulette_probabilities(equal))
    CHECK(p == doctest::Approx(0.25).epsilon(1e-12));

  const std::array<double, 2> pair = {1.0, 3.0};
  const auto probs = ga::roulette_probabilities(pair);
  CHECK(probs[0] == doctest::Approx(0.75).epsilon(1e-9));
  CHECK(probs[1] == doctest::Approx(0.25).epsilon(1e-9));

  const std::array<double, 3> with_inf = {1.0, kInf, 2.0};
  const auto guarded = ga::roulette_probabilities(with_inf);
  CHECK(guarded[1] == 0.0);
  CHECK(guarded[0] + guarded[2] == doctest::Approx(1.0).epsilon(1e-12));

  Rng rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> costs(1 + trial % 20);
    for (double& c : costs) c = 1e-6 + 100.0 * rng.uniform();
    const auto p = ga::roulette_probabilities(costs);
    CHECK(std::abs(std::accumulate(p.begin(), p.end(), 0.0) - 1.0) < 1e-12);
    CHECK(*std::min_element(p.begin(), p.end()) >= 0.0);
  }

  const std::array<double, 2> all_inf = {kInf, kInf};
  CHECK_THROWS_AS(ga::roulette_probabilities(all_inf), std::invalid_argument);
  const std::array<double, 2> negative = {-1.0, 2.0};
  CHECK_THROWS_AS(ga::roulette_probabilities(negative), std::invalid_argument);
}

TEST_CASE("crossover") {
  ga::Genome a(5), b(5);
  a << 1, 2, 3, 4, 5;
  b << 10, 20, 30, 40, 50;
  ga::Genome child = ga::crossover(a, b, 2);
  ga::Genome expected(5);
  expected << 1, 2, 30, 40, 50;
  CHECK(child == expected);

  CHECK(ga::crossover(a, a, 3) == a);

  expected << 1, 2, 3, 4, 50;
  CHECK(ga::crossover(a, b, 4) == expected);

  CHECK_THROWS_AS(ga::crossover(a, b, 0), std::invalid_argument);
  CHECK_THROWS_AS(ga::crossover(a, b, 5), std::invalid_argument);
}

TEST_CASE("adaptive_mutation_prob") {
  CHECK(ga::adaptive_mutation_prob(11.0, 10.0, 2.0) == 0.5);
  CHECK(ga::adaptive_mutation_prob(2.0, 10.0, 2.0) == 0.0);
  CHECK(ga::adaptive_mutation_prob(10.0, 10.0, 2.0) == 0.5);
  CHECK(ga::adaptive_mutation_prob(6.0, 10.0, 2.0) ==
        doctest::Approx(0.25).epsilon(1e-12));
  // degenerate uniform population keeps exploring
  CHECK(ga::adaptive_mutation_prob(5.0, 5.0, 5.0) == 0.5);
  CHECK_THROWS_AS(ga::adaptive_mutation_prob(1.0, 2.0, 3.0),
                  std::invalid_argument);
}

TEST_CASE("mutate") {
  const ga::GeneBounds bounds = ga::GeneBounds::unit(6);
  ga::Genome genome(6);
  genome << 0.1, 0.3, 0.5, 0.7, 0.9, 1.0;
  Rng rng(5);
  CHECK(ga::mutate(genome, 0.0, bounds, 0.1, rng) == genome);

  // kicks stay within the width and clip at the box
  for (int trial = 0; trial < 200; ++trial) {
    const ga::Genome mutant = ga::mutate(genome, 1.0, bounds, 0.1, rng);
    for (int g = 0; g < 6; ++g) {
      CHECK(mutant[g] >= 0.0);
      CHECK(mutant[g] <= 1.0);
      CHECK(std::abs(mutant[g] - genome[g]) <= 0.1 + 1e-15);
    }
  }

  // per-gene change rate matches the mutation probability
  const int trials = 10000;
  int changed = 0;
  ga::Genome interior = ga::Genome::Constant(6, 0.5);
  for (int t = 0; t < trials; ++t) {
    const ga::Genome mutant = ga::mutate(interior, 0.3, bounds, 0.1, rng);
    for (int g = 0; g < 6; ++g)
      if (mutant[g] != interior[g]) ++changed;
  }
  const double rate = static_cast<double>(changed) / (6.0 * trials);
  const double sigma = std::sqrt(0.3 * 0.7 / (6.0 * trials));
  CHECK(std::abs(rate - 0.3) < 3.0 * sigma);
}

TEST_CASE("next_generation size and elitism") {
  ga::GaConfig config = small_config(5, 40);
  Rng rng(77);
  auto population = ga::init_population(config, rng);

  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> costs(population.size());
    for (std::size_t i = 0; i < population.size(); ++i)
      costs[i] = sphere(population[i]);
    const int best =
        static_cast<int>(std::min_element(costs.begin(), costs.end()) -
                         costs.begin());
    const ga::Genome elite = population[best];
    population = ga::next_generation(population, costs, config, rng);
    CHECK(static_cast<int>(population.size()) == config.population_size);
    CHECK(std::count(population.begin(), population.end(), elite) >= 1);
  }
}

TEST_CASE("next_generation keeps genes inside bounds") {
  ga::GaConfig config = small_config(4, 30);
  config.bounds.lower = Eigen::VectorXd::Constant(4, 0.2);
  config.bounds.upper = Eigen::VectorXd::Constant(4, 0.8);
  Rng rng(13);
  auto population = ga::init_population(config, rng);
  long checks = 0;
  for (int gen = 0; gen < 300; ++gen) {
    std::vector<double> costs(population.size());
    for (std::size_t i = 0; i < population.size(); ++i)
      costs[i] = sphere(population[i]);
    population = ga::next_generation(population, costs, config, rng);
    for (const auto& genome : population)
      for (int g = 0; g < 4; ++g) {
        CHECK(genome[g] >= 0.2);
        CHECK(genome[g] <= 0.8);
        ++checks;
      }
  }
  CHECK(checks == 300L * 30 * 4);
}

TEST_CASE("degenerate settings copy the population") {
  // every member selected once, no crossover, zero-width mutation: the next
  // generation is a permutation of the current one
  ga::GaConfig config = small_config(5, 20);
  config.n_parents = 20;
  config.crossover_rate = 0.0;
  config.mutation_width = 0.0;
  Rng rng(3);
  auto population = ga::init_population(config, rng);
  std::vector<double> costs(population.size());
  for (std::size_t i = 0; i < population.size(); ++i)
    costs[i] = sphere(population[i]);
  auto next = ga::next_generation(population, costs, config, rng);
  REQUIRE(next.size() == population.size());
  const auto genome_less = [](const ga::Genome& a, const ga::Genome& b) {
    for (int g = 0; g < a.size(); ++g)
      if (a[g] != b[g]) return a[g] < b[g];
    return false;
  };
  std::sort(population.begin(), population.end(), genome_less);
  std::sort(next.begin(), next.end(), genome_less);
  for (std::size_t i = 0; i < next.size(); ++i)
    CHECK(next[i] == population[i]);
}

TEST_CASE("deterministic cost gives a non-increasing best trace") {
  ga::GaConfig config = small_config(6, 50);
  Rng rng(2025);
  auto population = ga::init_population(config, rng);
  double previous_best = kInf;
  for (int gen = 0; gen < 80; ++gen) {
    std::vector<double> costs(population.size());
    for (std::size_t i = 0; i < population.size(); ++i)
      costs[i] = sphere(population[i]);
    const double best = *std::min_element(costs.begin(), costs.end());
    CHECK(best <= previous_best + 1e-15);
    previous_best = best;
    population = ga::next_generation(population, costs, config, rng);
  }
  CHECK(previous_best < 0.05);  // the GA actually made progress
}

TEST_CASE("whole evolution is reproducible from one seed") {
  ga::GaConfig config = small_config(5, 25);
  const auto run = [&](std::uint64_t seed) {
    Rng rng(seed);
    auto population = ga::init_population(config, rng);
    for (int gen = 0; gen < 30; ++gen) {
      std::vector<double> costs(population.size());
      for (std::size_t i = 0; i < population.size(); ++i)
        costs[i] = sphere(population[i]);
      population = ga::next_generation(population, costs, config, rng);
    }
    return population;
  };
  const auto a = run(11);
  const auto b = run(11);
  const auto c = run(12);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
  bool any_differs = false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != c[i]) any_differs = true;
  CHECK(any_differs);
}

TEST_CASE("parent count can be a population fraction") {
  ga::GaConfig config = small_config(5, 150);
  CHECK(config.resolved_parent_count() == 10);
  config.parents_as_fraction = true;
  CHECK(config.resolved_parent_count() == 30);  // 20% of 150
  config.population_size = 50;
  CHECK(config.resolved_parent_count() == 10);  // 20% of 50
}

TEST_CASE("sample_discrete follows the weights") {
  const std::array<double, 3> probs = {0.2, 0.0, 0.8};
  Rng rng(88);
  int counts[3] = {0, 0, 0};
  for (int i = 0; i < 20000; ++i) ++counts[ga::sample_discrete(probs, rng)];
  CHECK(counts[1] == 0);
  CHECK(std::abs(counts[0] / 20000.0 - 0.2) < 0.02);
  CHECK(std::abs(counts[2] / 20000.0 - 0.8) < 0.02);
}

TEST_CASE("infinite-cost members are never selected as parents") {
  ga::GaConfig config = small_config(3, 10);
  config.n_parents = 5;
  config.crossover_rate = 0.0;
  config.mutation_width = 0.0;
  Rng rng(6);
  auto population = ga::init_population(config, rng);
  std::vector<double> costs(population.size(), kInf);
  for (int i = 0; i < 5; ++i) {
    population[i] = ga::Genome::Constant(3, 0.111 + 0.1 * i);
    costs[i] = 1.0 + i;
  }
  for (int trial = 0; trial < 200; ++trial) {
    const auto next = ga::next_generation(population, costs, config, rng);
    for (int k = 0; k < 5; ++k) {
      bool from_finite = false;
      for (int i = 0; i < 5; ++i)
        if (next[k] == population[i]) from_finite = true;
      CHECK(from_finite);
    }
  }
}
