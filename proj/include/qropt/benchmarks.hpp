#pragma once

#include <span>

#include "qropt/rng.hpp"

namespace qropt::bench {

struct Box {
  double lo;
  double hi;
};

inline constexpr Box kQuarticBox{-1.28, 1.28};
inline constexpr Box kRastriginBox{-5.12, 5.12};
inline constexpr int kQuarticDim = 30;
inline constexpr int kRastriginDim = 20;

// sum_k k x_k^4, global minimum 0 at the origin; coordinates must lie in
// [-1.28, 1.28].
double quartic(std::span<const double> x);

// The noisy variant adds an independent N(0, 1) draw per summand.
double quartic(std::span<const double> x, Rng& rng);

// 10 d + sum_i (x_i^2 - 10 cos(2 pi x_i)) over [-5.12, 5.12]^d; at the
// canonical d = 20 the leading constant is 200. Global minimum 0 at the
// origin.
double rastrigin(std::span<const double> x);

}  // namespace qropt::bench
