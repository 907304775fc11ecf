#include "simcal/stability.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "simcal/error.hpp"

namespace simcal {

namespace {

std::string optional_string(const nlohmann::json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || j[key].is_null()) return {};
  if (!j[key].is_string()) throw ValidationError(where + "field '" + key + "' must be a string");
  return j[key].get<std::string>();
}

StabilityRow summarize(std::string label, std::span<const double> scores, double tau) {
  StabilityRow row;
  row.label = std::move(label);
  row.n = scores.size();
  long double sum = 0.0L;
  for (double s : scores) sum += s;
  const long double mean = sum / static_cast<long double>(scores.size());
  long double ss = 0.0L;
  std::size_t above = 0;
  for (double s : scores) {
    ss += (s - mean) * (s - mean);
    above += s >= tau;
  }
  row.mean = static_cast<double>(mean);
  row.std_dev = static_cast<double>(std::sqrt(ss / static_cast<long double>(scores.size())));
  row.rate = static_cast<double>(above) / static_cast<double>(scores.size());
  return row;
}

}  // namespace

bool is_known_perturbation_type(std::string_view label) {
  return std::find(std::begin(kPerturbationTypes), std::end(kPerturbationTypes), label) !=
         std::end(kPerturbationTypes);
}

PerturbationDataset read_perturbation_dataset(std::istream& in) {
  PerturbationDataset ds;
  std::set<std::string> seen_ids;
  std::set<std::string> warned_labels;
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

    PerturbationPair p;
    if (!j.contains("id")) throw ValidationError(where + "missing field 'id'");
    p.id = j["id"].is_string() ? j["id"].get<std::string>() : j["id"].dump();
    p.type_label = optional_string(j, "type", where);
    if (p.type_label.empty()) throw ValidationError(where + "missing field 'type'");
    p.text_a = optional_string(j, "text_a", where);
    p.text_b = optional_string(j, "text_b", where);
    p.emb_ref_a = optional_string(j, "emb_ref_a", where);
    p.emb_ref_b = optional_string(j, "emb_ref_b", where);
    if (j.contains("raw_score") && !j["raw_score"].is_null()) {
      if (!j["raw_score"].is_number()) throw ValidationError(where + "raw_score must be a number");
      const double s = j["raw_score"].get<double>();
      if (!(s >= -1.0 && s <= 1.0)) throw ValidationError(where + "raw_score out of range [-1, 1]");
      p.raw_score = s;
    } else if (p.emb_ref_a.empty() || p.emb_ref_b.empty()) {
      throw ValidationError(where + "raw_score missing and no embedding references to compute it");
    }

    if (!is_known_perturbation_type(p.type_label) && warned_labels.insert(p.type_label).second) {
      ds.warnings.push_back(where + "unknown perturbation type '" + p.type_label + "'");
    }
    if (!seen_ids.insert(p.id).second) ds.warnings.push_back(where + "duplicate id '" + p.id + "'");
    ds.pairs.push_back(std::move(p));
  }
  if (ds.pairs.empty()) throw ValidationError("perturbation dataset is empty");
  return ds;
}

PerturbationDataset load_perturbation_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open perturbation dataset: " + path);
  return read_perturbation_dataset(in);
}

void resolve_scores(std::vector<PerturbationPair>& pairs, const std::unordered_map<std::string, Vector>& embeddings) {
  for (auto& p : pairs) {
    if (p.raw_score) continue;
    const auto a = embeddings.find(p.emb_ref_a);
    const auto b = embeddings.find(p.emb_ref_b);
    if (a == embeddings.end() || b == embeddings.end()) {
      throw ValidationError("pair '" + p.id + "': embedding reference not found");
    }
    p.raw_score = cosine(normalize(a->second), normalize(b->second));
  }
}

StabilityReport evaluate_stability(std::span<const PerturbationPair> pairs, const CalibrationModel* model, double tau) {
  if (pairs.empty()) throw ValidationError("stability: no pairs");
  std::map<std::string, std::vector<double>> groups;
  std::vector<std::string> unknown_order;
  std::vector<double> all;
  all.reserve(pairs.size());
  for (const auto& p : pairs) {
    if (!p.raw_score) throw ValidationError("stability: pair '" + p.id + "' has no score");
    const double s = model ? model->apply(*p.raw_score) : *p.raw_score;
    auto [it, inserted] = groups.try_emplace(p.type_label);
    if (inserted && !is_known_perturbation_type(p.type_label)) unknown_order.push_back(p.type_label);
    it->second.push_back(s);
    all.push_back(s);
  }

  StabilityReport report;
  report.threshold_used = tau;
  report.similarity_label = model ? SimilarityLabel::calibrated : SimilarityLabel::raw;
  for (std::string_view label : kPerturbationTypes) {
    const auto it = groups.find(std::string(label));
    if (it != groups.end()) report.rows.push_back(summarize(it->first, it->second, tau));
  }
  for (const auto& label : unknown_order) report.rows.push_back(summarize(label, groups.at(label), tau));
  report.overall = summarize("ALL", all, tau);
  return report;
}

std::string format_stability_text(const StabilityReport& report) {
  std::ostringstream os;
  char buf[200];
  std::snprintf(buf, sizeof(buf), "similarity=%s threshold=%.4f\n",
                std::string(similarity_label_name(report.similarity_label)).c_str(), report.threshold_used);
  os << buf;
  std::snprintf(buf, sizeof(buf), "%-24s %7s %7s %8s %10s\n", "Perturbation type", "Pairs", "Mean", "Std.Dev",
                "Stab.Rate");
  os << buf;
  const auto row_line = [&](const StabilityRow& r, const std::string& label) {
    std::snprintf(buf, sizeof(buf), "%-24s %7zu %7.3f %8.3f %10.2f\n", label.c_str(), r.n, r.mean, r.std_dev, r.rate);
    os << buf;
  };
  for (const auto& r : report.rows) {
    std::string label = r.label;
    std::replace(label.begin(), label.end(), '_', ' ');
    row_line(r, label);
  }
  row_line(report.overall, "All types (overall)");
  return os.str();
}

std::string format_stability_csv(const StabilityReport& report) {
  std::ostringstream os;
  os << "type,n,mean,std,rate,threshold,similarity\n";
  char buf[200];
  const std::string sim(similarity_label_name(report.similarity_label));
  const auto row_line = [&](const StabilityRow& r) {
    std::snprintf(buf, sizeof(buf), "%s,%zu,%.17g,%.17g,%.17g,%.17g,%s\n", r.label.c_str(), r.n, r.mean, r.std_dev,
                  r.rate, report.threshold_used, sim.c_str());
    os << buf;
  };
  for (const auto& r : report.rows) row_line(r);
  row_line(report.overall);
  return os.str();
}

}  // namespace simcal
