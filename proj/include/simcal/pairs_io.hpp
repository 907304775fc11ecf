#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "simcal/metrics.hpp"

namespace simcal {

// JSONL, one {"id", "model_score", "human_score"} object per line. Readers
// reject out-of-range scores with the offending line number; blank lines are
// skipped.
std::vector<ScoredPair> read_pairs_jsonl(std::istream& in);
std::vector<ScoredPair> load_pairs(const std::string& path);
void write_pairs_jsonl(std::ostream& out, std::span<const ScoredPair> pairs);

}  // namespace simcal
