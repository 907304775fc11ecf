#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace simcal {

using Vector = std::vector<double>;

/// An identified embedding. After normalize() the vector lies on the unit sphere.
struct EmbeddingRecord {
  std::string id;
  Vector vector;
};

/// Pairwise cosine statistics of a vector set (or a stream of sampled pairs).
struct IsotropyStats {
  std::size_t n_pairs = 0;
  double mean_cos = 0.0;
  double std_cos = 0.0;  // population standard deviation
  std::size_t dimension = 0;
};

// Tolerance used when checking that cosine() inputs are unit vectors.
inline constexpr double kUnitNormTolerance = 1e-6;

/// Scales v to unit l2 norm. Throws ValidationError("degenerate embedding") on a zero vector.
Vector normalize(std::span<const double> v);

/// Inner product of two unit vectors, clamped to [-1, 1].
/// Throws ValidationError on dimension mismatch or non-unit input.
double cosine(std::span<const double> u, std::span<const double> v);

/// Euclidean norm, accumulated in extended precision.
double l2_norm(std::span<const double> v);

/// n points drawn uniformly from the (dim-1)-sphere as normalized i.i.d.
/// standard Gaussians. Bit-reproducible for a given seed.
std::vector<Vector> sample_uniform_sphere(std::size_t dim, std::size_t n, std::uint64_t seed);

/// Mean and std of cosine over all unordered distinct pairs, in input order.
IsotropyStats isotropy_stats(std::span<const Vector> vectors);

/// Same statistics over n_pairs independently sampled pairs of uniform
/// sphere points. Memory use is O(dim).
IsotropyStats isotropy_baseline(std::size_t dim, std::size_t n_pairs, std::uint64_t seed);

}  // namespace simcal
