#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "simcal/metrics.hpp"

namespace testing_support {

// Noisy monotone relation between model and human scores.
inline std::vector<simcal::ScoredPair> random_pairs(std::mt19937_64& rng, std::size_t n, double noise = 0.1) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> eps(0.0, noise);
  std::vector<simcal::ScoredPair> pairs;
  for (std::size_t i = 0; i < n; ++i) {
    const double h = unit(rng);
    double m = 0.3 + 0.6 * h + eps(rng);
    if (m > 1.0) m = 1.0;
    if (m < -1.0) m = -1.0;
    pairs.push_back({"p" + std::to_string(i), m, h});
  }
  return pairs;
}

inline std::vector<double> uniform_values(std::mt19937_64& rng, std::size_t n, double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

}  // namespace testing_support
