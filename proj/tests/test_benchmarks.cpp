#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "qropt/benchmarks.hpp"

using namespace qropt;

TEST_CASE("quartic noise off") {
  const std::vector<double> origin(30, 0.0);
  CHECK(bench::quartic(origin) == 0.0);

  const std::vector<double> corner(30, 1.28);
  CHECK(bench::quartic(corner) ==
        doctest::Approx(1248.2248704).epsilon(1e-12));

  // even in every coordinate
  Rng rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> x(30);
    for (double& xi : x) xi = rng.uniform(-1.28, 1.28);
    std::vector<double> flipped = x;
    for (double& xi : flipped) xi = -xi;
    CHECK(bench::quartic(x) == doctest::Approx(bench::quartic(flipped)));
  }

  const std::vector<double> outside(30, 1.3);
  CHECK_THROWS_AS(bench::quartic(outside), std::invalid_argument);
}

TEST_CASE("quartic noise is centered") {
  const std::vector<double> origin(30, 0.0);
  Rng rng(99);
  const int n = 10000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += bench::quartic(origin, rng);
  const double mean = sum / n;
  // 30 unit normals per evaluation: stderr of the mean is sqrt(30/n)
  CHECK(std::abs(mean) < 3.0 * std::sqrt(30.0 / n));
}

TEST_CASE("rastrigin") {
  const std::vector<double> origin(20, 0.0);
  CHECK(bench::rastrigin(origin) == 0.0);

  std::vector<double> one_coordinate(20, 0.0);
  one_coordinate[7] = 1.0;
  CHECK(bench::rastrigin(one_coordinate) == doctest::Approx(1.0).epsilon(1e-12));

  Rng rng(123);
  for (int trial = 0; trial < 100000; ++trial) {
    std::vector<double> x(20);
    bool at_origin = true;
    for (double& xi : x) {
      xi = rng.uniform(-5.12, 5.12);
      at_origin = at_origin && xi == 0.0;
    }
    const double value = bench::rastrigin(x);
    CHECK(value >= 0.0);
    if (!at_origin) CHECK(value > 1e-9);
  }

  const std::vector<double> outside(20, 5.2);
  CHECK_THROWS_AS(bench::rastrigin(outside), std::invalid_argument);
}
