#include "simcal/isotonic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "simcal/error.hpp"

namespace simcal {

namespace {

struct Block {
  long double sum_wy;
  long double sum_w;
  std::size_t count;

  long double mean() const { return sum_wy / sum_w; }
};

}  // namespace

std::vector<double> pava(std::span<const double> y, std::span<const double> w) {
  if (y.size() != w.size()) throw ValidationError("pava: values and weights differ in length");
  std::vector<Block> blocks;
  blocks.reserve(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (!(w[i] > 0.0) || !std::isfinite(w[i])) throw ValidationError("pava: weights must be positive");
    if (!std::isfinite(y[i])) throw ValidationError("pava: non-finite value");
    blocks.push_back({static_cast<long double>(w[i]) * y[i], w[i], 1});
    while (blocks.size() > 1 && blocks[blocks.size() - 2].mean() > blocks.back().mean()) {
      const Block top = blocks.back();
      blocks.pop_back();
      auto& prev = blocks.back();
      prev.sum_wy += top.sum_wy;
      prev.sum_w += top.sum_w;
      prev.count += top.count;
    }
  }
  std::vector<double> out;
  out.reserve(y.size());
  for (const auto& b : blocks) out.insert(out.end(), b.count, static_cast<double>(b.mean()));
  return out;
}

IsotonicFit isotonic_regression(std::span<const double> x, std::span<const double> y, std::span<const double> w) {
  if (x.size() != y.size() || (!w.empty() && w.size() != x.size())) {
    throw ValidationError("isotonic regression: input lengths differ");
  }
  const std::size_t n = x.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });

  IsotonicFit fit;
  std::vector<double> merged_y;
  std::size_t i = 0;
  while (i < n) {
    const double xi = x[order[i]];
    if (!std::isfinite(xi)) throw ValidationError("isotonic regression: non-finite x");
    long double sw = 0.0L;
    long double swy = 0.0L;
    while (i < n && x[order[i]] == xi) {
      const double wi = w.empty() ? 1.0 : w[order[i]];
      if (!(wi > 0.0)) throw ValidationError("isotonic regression: weights must be positive");
      sw += wi;
      swy += static_cast<long double>(wi) * y[order[i]];
      ++i;
    }
    fit.x.push_back(xi);
    fit.weight.push_back(static_cast<double>(sw));
    merged_y.push_back(static_cast<double>(swy / sw));
  }
  fit.fitted = pava(merged_y, fit.weight);
  return fit;
}

}  // namespace simcal
