#include "simcal/model_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "simcal/error.hpp"

namespace simcal {

namespace {

using nlohmann::json;

std::vector<double> number_list(const json& j, const char* key) {
  if (!j.contains(key)) throw ValidationError(std::string("model: missing field '") + key + "'");
  const auto& v = j[key];
  if (!v.is_array()) throw ValidationError(std::string("model: '") + key + "' must be an array");
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& x : v) {
    if (!x.is_number()) throw ValidationError(std::string("model: '") + key + "' has a non-numeric entry");
    out.push_back(x.get<double>());
  }
  return out;
}

}  // namespace

std::string serialize(const CalibrationModel& model) {
  const auto& meta = model.train_meta();
  const auto& d = meta.diagnostics;
  json j;
  j["schema"] = kModelSchema;
  j["method"] = std::string(method_name(model.method()));
  j["params"] = model.params();
  j["breakpoints"] = model.breakpoints();
  j["values"] = model.values();
  j["clamp"] = {model.clamp_lo(), model.clamp_hi()};
  j["train_meta"] = {{"dataset_digest", meta.dataset_digest},
                     {"n", meta.n},
                     {"diagnostics",
                      {{"converged", d.converged},
                       {"objective", d.objective},
                       {"gradient_norm", d.gradient_norm},
                       {"iterations", d.iterations},
                       {"flags", d.flags}}}};
  return j.dump(2);
}

CalibrationModel deserialize(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error&) {
    throw ValidationError("model: invalid JSON");
  }
  if (!j.is_object()) throw ValidationError("model: expected a JSON object");
  if (!j.contains("schema") || j["schema"] != kModelSchema) {
    throw ValidationError(std::string("model: schema must be '") + kModelSchema + "'");
  }
  if (!j.contains("method") || !j["method"].is_string()) throw ValidationError("model: missing method");
  const auto method = parse_method(j["method"].get<std::string>());
  if (!method) throw ValidationError("model: unknown method '" + j["method"].get<std::string>() + "'");

  const auto clamp = number_list(j, "clamp");
  if (clamp.size() != 2) throw ValidationError("model: clamp must hold two numbers");

  TrainMeta meta;
  if (j.contains("train_meta")) {
    const auto& m = j["train_meta"];
    if (!m.is_object()) throw ValidationError("model: train_meta must be an object");
    try {
      meta.dataset_digest = m.value("dataset_digest", std::string{});
      meta.n = m.value("n", std::size_t{0});
      if (m.contains("diagnostics")) {
        const auto& d = m["diagnostics"];
        meta.diagnostics.converged = d.value("converged", true);
        meta.diagnostics.objective = d.value("objective", 0.0);
        meta.diagnostics.gradient_norm = d.value("gradient_norm", 0.0);
        meta.diagnostics.iterations = d.value("iterations", std::size_t{0});
        meta.diagnostics.flags = d.value("flags", std::vector<std::string>{});
      }
    } catch (const json::exception&) {
      throw ValidationError("model: malformed train_meta");
    }
  }

  return CalibrationModel::from_parts(*method, number_list(j, "params"), number_list(j, "breakpoints"),
                                      number_list(j, "values"), clamp[0], clamp[1], std::move(meta));
}

CalibrationModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open model file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return deserialize(ss.str());
}

}  // namespace simcal
