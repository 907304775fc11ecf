#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "simcal/calibration_model.hpp"
#include "simcal/geometry.hpp"
#include "simcal/thresholds.hpp"

namespace simcal {

/// The seven perturbation categories, in report order.
inline constexpr std::string_view kPerturbationTypes[] = {
    "DETERMINER_VARIATION", "TENSE_VARIATION",        "SYNONYM_SUBSTITUTION", "LOGICAL_PARAPHRASE",
    "NOMINALIZATION",       "COREFERENCE_EXPANSION", "QUANTIFIER_VARIATION",
};

bool is_known_perturbation_type(std::string_view label);

/// An original/perturbed sentence pair. raw_score is either ingested or
/// resolved later from an embedding file through emb_ref_a/emb_ref_b.
struct PerturbationPair {
  std::string id;
  std::string type_label;
  std::string text_a;
  std::string text_b;
  std::string emb_ref_a;
  std::string emb_ref_b;
  std::optional<double> raw_score;
};

struct PerturbationDataset {
  std::vector<PerturbationPair> pairs;
  std::vector<std::string> warnings;
};

/// JSONL with fields id, type, raw_score (optional: text_a, text_b,
/// emb_ref_a, emb_ref_b). A line needs raw_score or both embedding
/// references. Unknown type labels and duplicate ids produce warnings;
/// malformed lines and empty input throw ValidationError naming the line.
PerturbationDataset read_perturbation_dataset(std::istream& in);
PerturbationDataset load_perturbation_dataset(const std::string& path);

/// Fills missing raw scores with the cosine of the referenced embeddings.
void resolve_scores(std::vector<PerturbationPair>& pairs, const std::unordered_map<std::string, Vector>& embeddings);

struct StabilityRow {
  std::string label;
  std::size_t n = 0;
  double mean = 0.0;
  double std_dev = 0.0;  // population (n denominator)
  double rate = 0.0;     // fraction of scores >= threshold
};

struct StabilityReport {
  std::vector<StabilityRow> rows;  // known types in canonical order, then unknown labels by first appearance
  StabilityRow overall;
  double threshold_used = 0.0;
  SimilarityLabel similarity_label = SimilarityLabel::raw;
};

/// Per-type mean, population std and stability rate of the raw scores, or
/// of their calibrated images when a model is given. Empty groups are
/// omitted. Throws ValidationError on empty input or unresolved scores.
StabilityReport evaluate_stability(std::span<const PerturbationPair> pairs, const CalibrationModel* model, double tau);

std::string format_stability_text(const StabilityReport& report);
std::string format_stability_csv(const StabilityReport& report);

}  // namespace simcal
