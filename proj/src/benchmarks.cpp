#include "qropt/benchmarks.hpp"

#include <cmath>
#include <stdexcept>

namespace qropt::bench {

namespace {

void check_box(std::span<const double> x, Box box, const char* name) {
  if (x.empty()) throw std::invalid_argument(std::string(name) + ": empty point");
  for (double xi : x)
    if (!(xi >= box.lo && xi <= box.hi))
      throw std::invalid_argument(std::string(name) +
                                  ": coordinate outside the search box");
}

}  // namespace

double quartic(std::span<const double> x) {
  check_box(x, kQuarticBox, "quartic");
  double sum = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double sq = x[k] * x[k];
    sum += static_cast<double>(k + 1) * sq * sq;
  }
  return sum;
}

double quartic(std::span<const double> x, Rng& rng) {
  double sum = quartic(x);
  for (std::size_t k = 0; k < x.size(); ++k) sum += rng.normal();
  return sum;
}

double rastrigin(std::span<const double> x) {
  check_box(x, kRastriginBox, "rastrigin");
  constexpr double kTwoPi = 6.283185307179586476925286766559;
  double sum = 10.0 * static_cast<double>(x.size());
  for (double xi : x) sum += xi * xi - 10.0 * std::cos(kTwoPi * xi);
  return sum;
}

}  // namespace qropt::bench
