#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "tikgamma/space.hpp"

namespace testing {

inline constexpr double pi = std::numbers::pi;

// Seeded generator for property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  double normal() { return std::normal_distribution<double>()(rng_); }
  std::size_t index(std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_);
  }

  tikgamma::GridFunction function(const tikgamma::GridSpec& grid, double scale = 1.0) {
    std::vector<double> v(grid.size());
    for (double& e : v) e = scale * normal();
    return {grid, std::move(v)};
  }

 private:
  std::mt19937_64 rng_;
};

inline tikgamma::GridFunction sampled(const tikgamma::GridSpec& grid, double (*fn)(double)) {
  return tikgamma::GridFunction::sample(grid, fn);
}

inline double sin_pi(double x) { return std::sin(pi * x); }

}  // namespace testing
