#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace simcal {

/// One sentence pair: model cosine in [-1, 1] and human score in [0, 1].
struct ScoredPair {
  std::string id;
  double model_score = 0.0;
  double human_score = 0.0;
};

struct CalibrationBin {
  double lower = 0.0;
  double upper = 0.0;
  std::size_t count = 0;
  double acc = 0.0;   // mean human score in the bin
  double conf = 0.0;  // mean model score in the bin
};

struct EceResult {
  double ece = 0.0;
  std::vector<CalibrationBin> bins;
};

struct MetricsReport {
  std::size_t n = 0;
  std::size_t n_bins = 0;
  double rmse = 0.0;
  double mbe = 0.0;
  double ece = 0.0;
  double pearson = 0.0;
  double spearman = 0.0;
  std::vector<CalibrationBin> bins;
};

inline constexpr std::size_t kDefaultEceBins = 10;

double rmse(std::span<const ScoredPair> pairs);

// Positive when the model overestimates.
double mbe(std::span<const ScoredPair> pairs);

/// Expected calibration error over n_bins equal-width bins of [0, 1].
/// Model scores are clamped into [0, 1] to pick a bin only; conf averages
/// the unclamped scores. The last bin is closed on the right.
EceResult ece(std::span<const ScoredPair> pairs, std::size_t n_bins = kDefaultEceBins);

/// Recomputes ECE from per-bin detail.
double ece_from_bins(std::span<const CalibrationBin> bins);

double pearson(std::span<const ScoredPair> pairs);
double spearman(std::span<const ScoredPair> pairs);

// Column-wise versions; throw NumericError("undefined correlation") on a
// zero-variance margin.
double pearson(std::span<const double> x, std::span<const double> y);
double spearman(std::span<const double> x, std::span<const double> y);

/// 1-based ranks, ties get the mean of the ranks they span.
std::vector<double> average_ranks(std::span<const double> values);

MetricsReport evaluate_all(std::span<const ScoredPair> pairs, std::size_t n_bins = kDefaultEceBins);

std::vector<double> model_scores(std::span<const ScoredPair> pairs);
std::vector<double> human_scores(std::span<const ScoredPair> pairs);

std::string format_report(const MetricsReport& report);
std::string report_to_json(const MetricsReport& report);

}  // namespace simcal
