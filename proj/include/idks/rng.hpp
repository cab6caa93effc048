#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "idks/errors.hpp"

namespace idks {

// Derives an independent sub-seed from a master seed (splitmix64 step).
inline std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream_id) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream_id + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Seedable random source. The engine is std::mt19937_64 (bit-exact sequence
// by the standard); every derived draw below is implemented here rather than
// via std::*_distribution so that outputs are reproducible across standard
// libraries. Bounded integer draws use rejection and are exactly uniform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_bits() { return engine_(); }

  // Uniform integer in [0, n). Exact (rejection sampling).
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) throw ParameterError("Rng::below: n must be positive");
    const std::uint64_t rem = std::numeric_limits<std::uint64_t>::max() % n;
    // accept region is the largest multiple of n representable in 64 bits
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - rem;
    std::uint64_t r = engine_();
    while (rem + 1 != n && r >= limit) r = engine_();
    return r % n;
  }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Gaussian draw, Box-Muller with pair caching.
  double normal(double mean, double stddev) {
    if (has_cached_) {
      has_cached_ = false;
      return mean + stddev * cached_;
    }
    double u1 = uniform01();
    while (u1 == 0.0) u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    cached_ = r * std::sin(theta);
    has_cached_ = true;
    return mean + stddev * r * std::cos(theta);
  }

  // k distinct positions drawn uniformly from [0, n), ascending order
  // (selection sampling). Every k-subset has probability 1/C(n, k).
  void sample_positions(std::uint64_t n, std::size_t k, std::vector<std::uint64_t>& out) {
    if (k > n) throw ParameterError("Rng::sample_positions: k exceeds population");
    out.clear();
    out.reserve(k);
    std::uint64_t needed = k;
    for (std::uint64_t i = 0; i < n && needed > 0; ++i) {
      if (below(n - i) < needed) {
        out.push_back(i);
        --needed;
      }
    }
  }

  // In-place Fisher-Yates shuffle of index array [0, n).
  void shuffle_indices(std::vector<std::size_t>& idx) {
    for (std::size_t i = idx.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(idx[i - 1], idx[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace idks
