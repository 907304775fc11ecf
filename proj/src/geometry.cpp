#include "simcal/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "simcal/error.hpp"

namespace simcal {

double l2_norm(std::span<const double> v) {
  long double acc = 0.0L;
  for (double x : v) acc += static_cast<long double>(x) * x;
  return static_cast<double>(std::sqrt(acc));
}

Vector normalize(std::span<const double> v) {
  const double norm = l2_norm(v);
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw ValidationError("degenerate embedding");
  }
  Vector out(v.size());
  std::transform(v.begin(), v.end(), out.begin(), [norm](double x) { return x / norm; });
  return out;
}

double cosine(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) {
    throw ValidationError("dimension mismatch: " + std::to_string(u.size()) + " vs " +
                          std::to_string(v.size()));
  }
  long double dot = 0.0L;
  long double uu = 0.0L;
  long double vv = 0.0L;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += static_cast<long double>(u[i]) * v[i];
    uu += static_cast<long double>(u[i]) * u[i];
    vv += static_cast<long double>(v[i]) * v[i];
  }
  if (std::fabs(std::sqrt(static_cast<double>(uu)) - 1.0) > kUnitNormTolerance ||
      std::fabs(std::sqrt(static_cast<double>(vv)) - 1.0) > kUnitNormTolerance) {
    throw ValidationError("cosine requires unit vectors");
  }
  return std::clamp(static_cast<double>(dot), -1.0, 1.0);
}

namespace {

void fill_gaussian_unit(Vector& out, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  long double norm2 = 0.0L;
  do {
    norm2 = 0.0L;
    for (double& x : out) {
      x = gauss(rng);
      norm2 += static_cast<long double>(x) * x;
    }
  } while (norm2 == 0.0L);
  const double norm = static_cast<double>(std::sqrt(norm2));
  for (double& x : out) x /= norm;
}

// Streaming mean/variance in input order; long double keeps the result
// independent of how callers batch the pairs.
struct MomentAccumulator {
  std::size_t n = 0;
  long double sum = 0.0L;
  long double sum_sq = 0.0L;

  void add(double x) {
    ++n;
    sum += x;
    sum_sq += static_cast<long double>(x) * x;
  }

  IsotropyStats finish(std::size_t dim) const {
    IsotropyStats s;
    s.n_pairs = n;
    s.dimension = dim;
    const long double mean = sum / static_cast<long double>(n);
    long double var = sum_sq / static_cast<long double>(n) - mean * mean;
    if (var < 0.0L) var = 0.0L;
    s.mean_cos = static_cast<double>(mean);
    s.std_cos = static_cast<double>(std::sqrt(var));
    return s;
  }
};

}  // namespace

std::vector<Vector> sample_uniform_sphere(std::size_t dim, std::size_t n, std::uint64_t seed) {
  if (dim < 2) throw ValidationError("sphere sampling requires dimension >= 2");
  if (n < 1) throw ValidationError("sphere sampling requires n >= 1");
  std::mt19937_64 rng(seed);
  std::vector<Vector> out(n, Vector(dim));
  for (auto& v : out) fill_gaussian_unit(v, rng);
  return out;
}

IsotropyStats isotropy_stats(std::span<const Vector> vectors) {
  if (vectors.size() < 2) throw ValidationError("isotropy statistics need at least 2 vectors");
  const std::size_t dim = vectors.front().size();
  for (const auto& v : vectors) {
    if (v.size() != dim) throw ValidationError("vectors have inconsistent dimensions");
  }
  // Two-pass for the variance: pair cosines are often nearly identical
  // (anisotropic sets), where the one-pass formula cancels badly.
  MomentAccumulator first;
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    for (std::size_t j = i + 1; j < vectors.size(); ++j) first.add(cosine(vectors[i], vectors[j]));
  }
  const long double mean = first.sum / static_cast<long double>(first.n);
  long double ss = 0.0L;
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    for (std::size_t j = i + 1; j < vectors.size(); ++j) {
      const long double d = cosine(vectors[i], vectors[j]) - mean;
      ss += d * d;
    }
  }
  IsotropyStats s;
  s.n_pairs = first.n;
  s.dimension = dim;
  s.mean_cos = static_cast<double>(mean);
  s.std_cos = static_cast<double>(std::sqrt(ss / static_cast<long double>(first.n)));
  return s;
}

IsotropyStats isotropy_baseline(std::size_t dim, std::size_t n_pairs, std::uint64_t seed) {
  if (dim < 2) throw ValidationError("sphere sampling requires dimension >= 2");
  if (n_pairs < 1) throw ValidationError("isotropy baseline requires n_pairs >= 1");
  std::mt19937_64 rng(seed);
  Vector u(dim);
  Vector v(dim);
  MomentAccumulator acc;
  for (std::size_t k = 0; k < n_pairs; ++k) {
    fill_gaussian_unit(u, rng);
    fill_gaussian_unit(v, rng);
    acc.add(cosine(u, v));
  }
  return acc.finish(dim);
}

}  // namespace simcal
