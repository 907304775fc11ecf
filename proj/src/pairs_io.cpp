#include "simcal/pairs_io.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "simcal/error.hpp"

namespace simcal {

namespace {

double number_field(const nlohmann::json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ValidationError(where + "missing field '" + key + "'");
  const auto& v = j[key];
  if (!v.is_number()) throw ValidationError(where + "field '" + key + "' is not a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ValidationError(where + "field '" + key + "' is not finite");
  return x;
}

}  // namespace

std::vector<ScoredPair> read_pairs_jsonl(std::istream& in) {
  std::vector<ScoredPair> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = "line " + std::to_string(line_no) + ": ";
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error&) {
      throw ValidationError(where + "invalid JSON");
    }
    if (!j.is_object()) throw ValidationError(where + "expected a JSON object");
    ScoredPair p;
    if (j.contains("id")) p.id = j["id"].is_string() ? j["id"].get<std::string>() : j["id"].dump();
    else p.id = std::to_string(line_no);
    p.model_score = number_field(j, "model_score", where);
    p.human_score = number_field(j, "human_score", where);
    if (p.model_score < -1.0 || p.model_score > 1.0) {
      throw ValidationError(where + "model_score out of range [-1, 1]");
    }
    if (p.human_score < 0.0 || p.human_score > 1.0) {
      throw ValidationError(where + "human_score out of range [0, 1]");
    }
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<ScoredPair> load_pairs(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open pairs file: " + path);
  return read_pairs_jsonl(in);
}

void write_pairs_jsonl(std::ostream& out, std::span<const ScoredPair> pairs) {
  for (const auto& p : pairs) {
    out << nlohmann::json{{"id", p.id}, {"model_score", p.model_score}, {"human_score", p.human_score}}.dump()
        << '\n';
  }
}

}  // namespace simcal
