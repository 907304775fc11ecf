#pragma once

#include <span>
#include <vector>

namespace simcal {

/// Weighted least-squares non-decreasing fit of an already ordered sequence,
/// by pool-adjacent-violators. Weights must be positive.
std::vector<double> pava(std::span<const double> y, std::span<const double> w);

/// Isotonic regression of y on x. Points sharing an x are merged first into
/// one point (weight = summed weight, value = weighted mean). The result is
/// indexed by the distinct x values in ascending order.
struct IsotonicFit {
  std::vector<double> x;
  std::vector<double> fitted;
  std::vector<double> weight;
};

IsotonicFit isotonic_regression(std::span<const double> x, std::span<const double> y,
                                std::span<const double> w = {});

}  // namespace simcal
