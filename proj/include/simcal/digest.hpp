#pragma once

#include <span>
#include <string>
#include <string_view>

#include "simcal/metrics.hpp"

namespace simcal {

/// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view data);

/// "sha256:<hex>" over the pairs in a canonical text form (id, model and
/// human score at 17 significant digits, one pair per line).
std::string pairs_digest(std::span<const ScoredPair> pairs);

}  // namespace simcal
