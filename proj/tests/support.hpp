#pragma once

#include "deltaring/core.hpp"

#include <cmath>
#include <cstdint>
#include <random>

namespace testing {

inline deltaring::SystemParams reference_params() {
  return {4.0, 4.0 / std::sqrt(2.0), 1.0};
}

// Seeded generator for hand-rolled property tests.
class Gen {
public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng_);
  }
  int integer(int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng_);
  }

private:
  std::mt19937_64 rng_;
};

inline double rel_diff(double x, double y) {
  return std::abs(x - y) / std::max(std::abs(y), 1e-300);
}

}  // namespace testing
