#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>

namespace qropt {

inline std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ull;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebull;
  z ^= z >> 31;
  return z;
}

// Seed hierarchy master -> generation -> individual -> run. Every stream is a
// pure function of its coordinates, so batches can be evaluated on any number
// of workers without changing results.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a,
                                 std::uint64_t b = 0, std::uint64_t c = 0) {
  std::uint64_t h = mix64(base + 0x9e3779b97f4a7c15ull);
  h = mix64(h ^ (a + 0xd1b54a32d192ed03ull));
  h = mix64(h ^ (b + 0x8cb92ba72f3d8dd7ull));
  h = mix64(h ^ (c + 0xa24baed4963ee407ull));
  return h;
}

// mt19937_64 with hand-rolled variate transforms. The engine's output
// sequence is pinned by the standard; the std::*_distribution adaptors are
// not, so they are avoided to keep seeded runs bit-identical everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // uniform on [0, 1) with 53-bit resolution
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // unbiased draw from [0, n)
  std::uint64_t uniform_index(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("uniform_index: n must be > 0");
    const std::uint64_t threshold = (0 - n) % n;  // 2^64 mod n
    std::uint64_t x = engine_();
    while (x < threshold) x = engine_();
    return x % n;
  }

  // standard normal via Box-Muller
  double normal() {
    constexpr double kTwoPi = 6.283185307179586476925286766559;
    const double u1 = 1.0 - uniform();  // (0, 1], keeps the log finite
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
  }

  // number of attempts until first success, geometric with mean 1/p.
  // Closed-form inversion: success probabilities down to ~1e-10 imply ~1e10
  // attempts, which must be sampled in O(1).
  std::int64_t geometric(double p) {
    if (!(p > 0.0) || p > 1.0)
      throw std::invalid_argument("geometric: p must be in (0, 1]");
    if (p == 1.0) return 1;
    const double u = uniform();  // [0, 1)
    const double trials = std::floor(std::log(1.0 - u) / std::log1p(-p));
    if (trials >= 9.0e18) return std::numeric_limits<std::int64_t>::max();
    return 1 + static_cast<std::int64_t>(trials);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace qropt
