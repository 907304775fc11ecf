#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "simcal/metrics.hpp"

namespace simcal {

inline constexpr std::size_t kDefaultCurvePoints = 512;
inline constexpr std::size_t kDefaultJointBins = 50;
inline constexpr double kDefaultSmoothSigma = 1.0;

/// Gaussian KDE evaluated on a grid.
struct DensityCurve {
  std::vector<double> grid;
  std::vector<double> values;
  double bandwidth = 0.0;
  std::size_t n_source = 0;
};

/// Joint density on a regular grid over [0, 1]^2. The x axis carries human
/// scores, the y axis model scores. density(i, j) is the cell with x bin i
/// and y bin j.
struct DensityGrid2D {
  std::vector<double> x_edges;
  std::vector<double> y_edges;
  std::vector<double> densities;  // row-major, nx rows of ny entries
  std::size_t n_source = 0;
  bool smoothed = false;
  double smooth_sigma = 0.0;

  std::size_t nx() const { return x_edges.empty() ? 0 : x_edges.size() - 1; }
  std::size_t ny() const { return y_edges.empty() ? 0 : y_edges.size() - 1; }
  double& at(std::size_t i, std::size_t j) { return densities[i * ny() + j]; }
  double at(std::size_t i, std::size_t j) const { return densities[i * ny() + j]; }
  /// Sum of density times cell area.
  double total_mass() const;
};

/// h = 1.06 * sd * n^(-1/5) with the n-1 sample standard deviation.
double silverman_bandwidth(std::span<const double> xs);

/// n evenly spaced points from lo to hi inclusive.
// Bandwidth used when Silverman's rule is undefined (n < 2 or constant data).
inline constexpr double kFallbackBandwidth = 0.01;

/// Silverman's bandwidth, or kFallbackBandwidth when it is undefined.
double bandwidth_or_fallback(std::span<const double> xs);

std::vector<double> uniform_grid(double lo, double hi, std::size_t n);

DensityCurve kde_1d(std::span<const double> xs, std::span<const double> grid, double h);

/// KDE on the default [0, 1] grid with the Silverman bandwidth.
DensityCurve kde_1d(std::span<const double> xs);

/// Counts on an nx by ny grid over [0, 1]^2 (model scores clamped),
/// normalized to N_ij / (n dx dy).
DensityGrid2D joint_histogram(std::span<const ScoredPair> pairs, std::size_t n_bins_x = kDefaultJointBins,
                              std::size_t n_bins_y = kDefaultJointBins);

/// Separable truncated Gaussian blur (radius ceil(3 sigma) cells). Each
/// source cell spreads its mass over the in-bounds part of the kernel, so
/// total mass is conserved at the edges. sigma_cells = 0 returns the input.
DensityGrid2D gaussian_smooth(const DensityGrid2D& grid, double sigma_cells = kDefaultSmoothSigma);

/// Trapezoidal integral of values over grid.
double trapezoid(std::span<const double> grid, std::span<const double> values);

}  // namespace simcal
