#include "simcal/thresholds.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "simcal/error.hpp"

namespace simcal {

std::string_view similarity_label_name(SimilarityLabel label) {
  return label == SimilarityLabel::raw ? "raw" : "calibrated";
}

double quantile(std::span<const double> xs, double p) {
  if (xs.empty()) throw ValidationError("quantile: empty input");
  if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("quantile: p must lie in [0, 1]");
  std::vector<double> sorted(xs.begin(), xs.end());
  std::sort(sorted.begin(), sorted.end());
  const double h = static_cast<double>(sorted.size() - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = h - static_cast<double>(lo);
  if (frac == 0.0) return sorted[lo];
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

std::vector<double> support_scores(std::span<const ScoredPair> pairs, double human_cutoff) {
  std::vector<double> out;
  for (const auto& p : pairs) {
    if (p.human_score > human_cutoff) out.push_back(p.model_score);
  }
  return out;
}

ThresholdSpec hcs_threshold(std::span<const ScoredPair> pairs, double alpha, double human_cutoff,
                            SimilarityLabel label) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("alpha must lie in (0, 1)");
  const auto support = support_scores(pairs, human_cutoff);
  if (support.empty()) throw ValidationError("no high-similarity pairs");
  ThresholdSpec spec;
  spec.alpha = alpha;
  spec.human_cutoff = human_cutoff;
  spec.value = quantile(support, alpha);
  spec.similarity_label = label;
  spec.n_support = support.size();
  return spec;
}

double calibrated_threshold(const CalibrationModel& model, double tau_raw) { return model.apply(tau_raw); }

double guarantee_check(std::span<const ScoredPair> pairs, double tau, double human_cutoff) {
  const auto support = support_scores(pairs, human_cutoff);
  if (support.empty()) throw ValidationError("no high-similarity pairs");
  const auto covered = std::count_if(support.begin(), support.end(), [tau](double s) { return s >= tau; });
  return static_cast<double>(covered) / static_cast<double>(support.size());
}

std::string threshold_to_json(const ThresholdSpec& spec, double coverage) {
  const nlohmann::json j = {{"similarity", std::string(similarity_label_name(spec.similarity_label))},
                            {"alpha", spec.alpha},
                            {"cutoff", spec.human_cutoff},
                            {"value", spec.value},
                            {"n_support", spec.n_support},
                            {"coverage", coverage}};
  return j.dump(2);
}

std::string format_threshold_row(const ThresholdSpec& spec, double coverage) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%-10s alpha=%.3f cutoff=%.3f tau=%.4f n_support=%zu coverage=%.4f",
                std::string(similarity_label_name(spec.similarity_label)).c_str(), spec.alpha, spec.human_cutoff,
                spec.value, spec.n_support, coverage);
  return buf;
}

}  // namespace simcal
