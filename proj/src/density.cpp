#include "simcal/density.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "simcal/error.hpp"

namespace simcal {

namespace {

std::size_t bin_of(double v, std::size_t n) {
  const double c = std::clamp(v, 0.0, 1.0);
  const auto b = static_cast<std::size_t>(c * static_cast<double>(n));
  return std::min(b, n - 1);
}

// One-dimensional mass-conserving blur of `count` lines of length `len`,
// where element k of line l lives at data[l * line_stride + k * elem_stride].
void blur_axis(std::vector<double>& data, std::size_t lines, std::size_t len, std::size_t line_stride,
               std::size_t elem_stride, double sigma) {
  const auto radius = static_cast<std::ptrdiff_t>(std::ceil(3.0 * sigma));
  std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
  for (std::ptrdiff_t d = -radius; d <= radius; ++d) {
    kernel[static_cast<std::size_t>(d + radius)] =
        std::exp(-0.5 * static_cast<double>(d * d) / (sigma * sigma));
  }
  std::vector<double> line(len);
  const auto n = static_cast<std::ptrdiff_t>(len);
  for (std::size_t l = 0; l < lines; ++l) {
    std::fill(line.begin(), line.end(), 0.0);
    for (std::ptrdiff_t c = 0; c < n; ++c) {
      const double mass = data[l * line_stride + static_cast<std::size_t>(c) * elem_stride];
      if (mass == 0.0) continue;
      const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, c - radius);
      const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(n - 1, c + radius);
      double norm = 0.0;
      for (std::ptrdiff_t t = lo; t <= hi; ++t) norm += kernel[static_cast<std::size_t>(t - c + radius)];
      for (std::ptrdiff_t t = lo; t <= hi; ++t) {
        line[static_cast<std::size_t>(t)] += mass * kernel[static_cast<std::size_t>(t - c + radius)] / norm;
      }
    }
    for (std::size_t k = 0; k < len; ++k) data[l * line_stride + k * elem_stride] = line[k];
  }
}

}  // namespace

double DensityGrid2D::total_mass() const {
  long double total = 0.0L;
  for (std::size_t i = 0; i < nx(); ++i) {
    const double dx = x_edges[i + 1] - x_edges[i];
    for (std::size_t j = 0; j < ny(); ++j) {
      total += static_cast<long double>(at(i, j)) * dx * (y_edges[j + 1] - y_edges[j]);
    }
  }
  return static_cast<double>(total);
}

double silverman_bandwidth(std::span<const double> xs) {
  if (xs.size() < 2) throw ValidationError("silverman bandwidth needs at least 2 points");
  long double mean = 0.0L;
  for (double x : xs) mean += x;
  mean /= static_cast<long double>(xs.size());
  long double ss = 0.0L;
  for (double x : xs) ss += (x - mean) * (x - mean);
  const double sd = static_cast<double>(std::sqrt(ss / static_cast<long double>(xs.size() - 1)));
  if (!(sd > 0.0)) throw NumericError("silverman bandwidth: zero variance");
  return 1.06 * sd * std::pow(static_cast<double>(xs.size()), -0.2);
}

double bandwidth_or_fallback(std::span<const double> xs) {
  if (xs.size() < 2) return kFallbackBandwidth;
  try {
    return silverman_bandwidth(xs);
  } catch (const NumericError&) {
    return kFallbackBandwidth;
  }
}

std::vector<double> uniform_grid(double lo, double hi, std::size_t n) {
  if (n < 2) throw ValidationError("grid needs at least 2 points");
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return g;
}

DensityCurve kde_1d(std::span<const double> xs, std::span<const double> grid, double h) {
  if (xs.empty()) throw ValidationError("kde: empty data");
  if (!(h > 0.0)) throw ValidationError("kde: bandwidth must be positive");
  if (!std::is_sorted(grid.begin(), grid.end())) throw ValidationError("kde: grid must be ascending");
  DensityCurve c;
  c.grid.assign(grid.begin(), grid.end());
  c.values.resize(grid.size());
  c.bandwidth = h;
  c.n_source = xs.size();
  const double scale = 1.0 / (static_cast<double>(xs.size()) * h * std::sqrt(2.0 * std::numbers::pi));
  for (std::size_t g = 0; g < grid.size(); ++g) {
    long double acc = 0.0L;
    for (double x : xs) {
      const double z = (grid[g] - x) / h;
      acc += std::exp(-0.5 * z * z);
    }
    c.values[g] = scale * static_cast<double>(acc);
  }
  return c;
}

DensityCurve kde_1d(std::span<const double> xs) {
  const auto grid = uniform_grid(0.0, 1.0, kDefaultCurvePoints);
  return kde_1d(xs, grid, silverman_bandwidth(xs));
}

DensityGrid2D joint_histogram(std::span<const ScoredPair> pairs, std::size_t n_bins_x, std::size_t n_bins_y) {
  if (pairs.empty()) throw ValidationError("joint histogram: empty input");
  if (n_bins_x < 1 || n_bins_y < 1) throw ValidationError("joint histogram: bins must be >= 1");
  DensityGrid2D g;
  g.n_source = pairs.size();
  g.x_edges.resize(n_bins_x + 1);
  g.y_edges.resize(n_bins_y + 1);
  for (std::size_t i = 0; i <= n_bins_x; ++i) g.x_edges[i] = static_cast<double>(i) / static_cast<double>(n_bins_x);
  for (std::size_t j = 0; j <= n_bins_y; ++j) g.y_edges[j] = static_cast<double>(j) / static_cast<double>(n_bins_y);
  std::vector<std::size_t> counts(n_bins_x * n_bins_y, 0);
  for (const auto& p : pairs) ++counts[bin_of(p.human_score, n_bins_x) * n_bins_y + bin_of(p.model_score, n_bins_y)];
  const double cell = (1.0 / static_cast<double>(n_bins_x)) * (1.0 / static_cast<double>(n_bins_y));
  const double norm = static_cast<double>(pairs.size()) * cell;
  g.densities.resize(counts.size());
  for (std::size_t k = 0; k < counts.size(); ++k) g.densities[k] = static_cast<double>(counts[k]) / norm;
  return g;
}

DensityGrid2D gaussian_smooth(const DensityGrid2D& grid, double sigma_cells) {
  if (!(sigma_cells >= 0.0)) throw ValidationError("smoothing sigma must be >= 0");
  DensityGrid2D out = grid;
  if (sigma_cells == 0.0) return out;
  const std::size_t nx = grid.nx();
  const std::size_t ny = grid.ny();
  blur_axis(out.densities, nx, ny, ny, 1, sigma_cells);  // along y within each x row
  blur_axis(out.densities, ny, nx, 1, ny, sigma_cells);  // along x within each y column
  out.smoothed = true;
  out.smooth_sigma = grid.smoothed ? std::hypot(grid.smooth_sigma, sigma_cells) : sigma_cells;
  return out;
}

double trapezoid(std::span<const double> grid, std::span<const double> values) {
  if (grid.size() != values.size()) throw ValidationError("trapezoid: length mismatch");
  long double total = 0.0L;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    total += 0.5L * (static_cast<long double>(values[i]) + values[i - 1]) * (grid[i] - grid[i - 1]);
  }
  return static_cast<double>(total);
}

}  // namespace simcal
