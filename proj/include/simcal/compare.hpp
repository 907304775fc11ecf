#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "simcal/calibration_model.hpp"
#include "simcal/metrics.hpp"

namespace simcal {

struct ComparisonRow {
  std::string label;
  std::optional<Method> method;  // empty for the uncalibrated baseline
  std::optional<MetricsReport> metrics;
  std::optional<CalibrationModel> model;
  std::string error;  // non-empty when fitting or evaluation failed
};

struct ComparisonTable {
  std::size_t n = 0;
  std::size_t n_bins = 0;
  std::vector<ComparisonRow> rows;  // rows[0] is the uncalibrated baseline

  const ComparisonRow* find(std::string_view label) const;
};

/// Fits every calibrator on pairs and evaluates it on the same pairs. Row
/// order: Original, Linear, Isotonic, Sigmoid, Beta, Polynomial-2/3/4. A
/// failing row records its error instead of aborting the table.
ComparisonTable compare_methods(std::span<const ScoredPair> pairs, std::size_t n_bins = kDefaultEceBins);

/// Percentage change vs the baseline, relative to |baseline|. NaN when the
/// baseline is zero.
double percent_delta(double value, double baseline);

enum class Metric { rmse, mbe, ece, pearson, spearman };

/// Delta of one metric; MBE compares magnitudes (bias size), the rest are signed.
double metric_delta(const MetricsReport& row, const MetricsReport& baseline, Metric metric);

std::string format_comparison_text(const ComparisonTable& table);
std::string format_comparison_csv(const ComparisonTable& table);

}  // namespace simcal
