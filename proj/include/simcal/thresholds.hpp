#pragma once

#include <span>
#include <string>
#include <vector>

#include "simcal/calibration_model.hpp"
#include "simcal/metrics.hpp"

namespace simcal {

inline constexpr double kDefaultAlpha = 0.05;
inline constexpr double kDefaultHumanCutoff = 0.9;

enum class SimilarityLabel { raw, calibrated };
std::string_view similarity_label_name(SimilarityLabel label);

/// High-confidence similarity threshold: the alpha-quantile of scores among
/// pairs whose human score is strictly above human_cutoff.
struct ThresholdSpec {
  double alpha = kDefaultAlpha;
  double human_cutoff = kDefaultHumanCutoff;
  double value = 0.0;
  SimilarityLabel similarity_label = SimilarityLabel::raw;
  std::size_t n_support = 0;
};

/// Linear interpolation between order statistics at h = (n - 1) p.
double quantile(std::span<const double> xs, double p);

/// Scores of the pairs with human_score > human_cutoff, in input order.
std::vector<double> support_scores(std::span<const ScoredPair> pairs, double human_cutoff);

/// Throws ValidationError("no high-similarity pairs") on an empty support set.
ThresholdSpec hcs_threshold(std::span<const ScoredPair> pairs, double alpha = kDefaultAlpha,
                            double human_cutoff = kDefaultHumanCutoff,
                            SimilarityLabel label = SimilarityLabel::raw);

/// Image of a raw threshold under the calibration map.
double calibrated_threshold(const CalibrationModel& model, double tau_raw);

/// Fraction of support pairs whose score is >= tau.
double guarantee_check(std::span<const ScoredPair> pairs, double tau, double human_cutoff = kDefaultHumanCutoff);

std::string threshold_to_json(const ThresholdSpec& spec, double coverage);
std::string format_threshold_row(const ThresholdSpec& spec, double coverage);

}  // namespace simcal
