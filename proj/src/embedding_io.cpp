#include "simcal/embedding_io.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "simcal/error.hpp"

namespace simcal {

namespace {

void check_common_dimension(std::span<const EmbeddingRecord> records) {
  if (records.empty()) return;
  const std::size_t d = records.front().vector.size();
  for (const auto& r : records) {
    if (r.vector.size() != d) throw ValidationError("embedding '" + r.id + "' has inconsistent dimension");
    if (r.id.find('\t') != std::string::npos || r.id.find('\n') != std::string::npos) {
      throw ValidationError("embedding id contains a tab or newline: '" + r.id + "'");
    }
  }
}

void put_f32_le(std::ostream& out, float value) {
  const auto bits = std::bit_cast<std::uint32_t>(value);
  const std::array<char, 4> bytes = {static_cast<char>(bits & 0xFFu), static_cast<char>((bits >> 8) & 0xFFu),
                                     static_cast<char>((bits >> 16) & 0xFFu),
                                     static_cast<char>((bits >> 24) & 0xFFu)};
  out.write(bytes.data(), bytes.size());
}

float get_f32_le(std::istream& in) {
  std::array<unsigned char, 4> b{};
  in.read(reinterpret_cast<char*>(b.data()), b.size());
  if (!in) throw ValidationError("embedding file truncated");
  const std::uint32_t bits = static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
                             (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
  return std::bit_cast<float>(bits);
}

}  // namespace

void write_embeddings_binary(std::ostream& out, std::span<const EmbeddingRecord> records) {
  check_common_dimension(records);
  const std::size_t d = records.empty() ? 0 : records.front().vector.size();
  out << kEmbeddingMagic << ' ' << kEmbeddingVersion << ' ' << d << ' ' << records.size() << " 32\n";
  for (const auto& r : records) {
    out.write(r.id.data(), static_cast<std::streamsize>(r.id.size()));
    out.put('\t');
    for (double x : r.vector) put_f32_le(out, static_cast<float>(x));
  }
  if (!out) throw Error("failed writing embedding file");
}

std::vector<EmbeddingRecord> read_embeddings_binary(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw ValidationError("embedding file is empty");
  std::istringstream hs(header);
  std::string magic, version, width;
  long long d = -1;
  long long n = -1;
  hs >> magic >> version >> d >> n >> width;
  if (magic != kEmbeddingMagic || version != kEmbeddingVersion) {
    throw ValidationError("not a simcal-emb v1 file");
  }
  if (width != "32" && width != "float-width=32") {
    throw ValidationError("unsupported float width '" + width + "'");
  }
  if (d < 0 || n < 0) throw ValidationError("bad embedding header: '" + header + "'");

  std::vector<EmbeddingRecord> out;
  out.reserve(static_cast<std::size_t>(n));
  for (long long k = 0; k < n; ++k) {
    EmbeddingRecord r;
    if (!std::getline(in, r.id, '\t')) {
      throw ValidationError("embedding file truncated at record " + std::to_string(k));
    }
    r.vector.resize(static_cast<std::size_t>(d));
    for (auto& x : r.vector) x = static_cast<double>(get_f32_le(in));
    out.push_back(std::move(r));
  }
  return out;
}

void write_embeddings_jsonl(std::ostream& out, std::span<const EmbeddingRecord> records) {
  check_common_dimension(records);
  for (const auto& r : records) {
    nlohmann::json vec = nlohmann::json::array();
    for (double x : r.vector) vec.push_back(static_cast<double>(static_cast<float>(x)));
    out << nlohmann::json{{"id", r.id}, {"vector", std::move(vec)}}.dump() << '\n';
  }
  if (!out) throw Error("failed writing embedding file");
}

std::vector<EmbeddingRecord> read_embeddings_jsonl(std::istream& in) {
  std::vector<EmbeddingRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = "line " + std::to_string(line_no) + ": ";
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ValidationError(where + "invalid JSON");
    }
    if (!j.is_object() || !j.contains("id") || !j.contains("vector") || !j["vector"].is_array()) {
      throw ValidationError(where + "expected object with 'id' and 'vector'");
    }
    EmbeddingRecord r;
    r.id = j["id"].is_string() ? j["id"].get<std::string>() : j["id"].dump();
    for (const auto& x : j["vector"]) {
      if (!x.is_number()) throw ValidationError(where + "non-numeric vector component");
      r.vector.push_back(static_cast<double>(static_cast<float>(x.get<double>())));
    }
    out.push_back(std::move(r));
  }
  check_common_dimension(out);
  return out;
}

std::vector<EmbeddingRecord> load_embeddings(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open embedding file: " + path);
  const int first = in.peek();
  if (first == '{') return read_embeddings_jsonl(in);
  return read_embeddings_binary(in);
}

std::unordered_map<std::string, Vector> index_embeddings(std::span<const EmbeddingRecord> records) {
  std::unordered_map<std::string, Vector> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    if (!out.emplace(r.id, r.vector).second) throw ValidationError("duplicate embedding id: " + r.id);
  }
  return out;
}

}  // namespace simcal
