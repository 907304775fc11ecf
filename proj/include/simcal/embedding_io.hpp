#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "simcal/geometry.hpp"

namespace simcal {

// Binary interchange layout:
//   "simcal-emb v1 <d> <n> 32\n"
//   n x { id bytes (UTF-8), '\t', d x little-endian IEEE-754 binary32 }
// Values are stored at binary32; reading widens them back to double.
inline constexpr const char* kEmbeddingMagic = "simcal-emb";
inline constexpr const char* kEmbeddingVersion = "v1";

void write_embeddings_binary(std::ostream& out, std::span<const EmbeddingRecord> records);
std::vector<EmbeddingRecord> read_embeddings_binary(std::istream& in);

// One JSON object per line: {"id": ..., "vector": [...]}.
void write_embeddings_jsonl(std::ostream& out, std::span<const EmbeddingRecord> records);
std::vector<EmbeddingRecord> read_embeddings_jsonl(std::istream& in);

// Dispatches on the first bytes of the file (binary magic vs JSON).
std::vector<EmbeddingRecord> load_embeddings(const std::string& path);

/// id -> vector. Throws ValidationError on duplicate ids.
std::unordered_map<std::string, Vector> index_embeddings(std::span<const EmbeddingRecord> records);

}  // namespace simcal
