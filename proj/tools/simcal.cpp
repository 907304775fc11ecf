// simcal: fit, apply and evaluate similarity calibration maps.
//
// Exit codes: 0 success, 1 usage error, 2 data validation error,
// 3 numeric failure (including failed invariance checks). Output files are
// staged in memory and written only after the whole subcommand succeeded.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "simcal/calibrators.hpp"
#include "simcal/compare.hpp"
#include "simcal/density.hpp"
#include "simcal/embedding_io.hpp"
#include "simcal/error.hpp"
#include "simcal/invariance.hpp"
#include "simcal/metrics.hpp"
#include "simcal/model_io.hpp"
#include "simcal/pairs_io.hpp"
#include "simcal/plot_export.hpp"
#include "simcal/stability.hpp"
#include "simcal/thresholds.hpp"

namespace fs = std::filesystem;
using namespace simcal;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitValidation = 2;
constexpr int kExitNumeric = 3;

struct RunConfig {
  std::string input;
  std::string model;
  std::string out_dir;
  std::string method = "isotonic";
  std::string embeddings;
  std::size_t bins = kDefaultEceBins;
  double alpha = kDefaultAlpha;
  double cutoff = kDefaultHumanCutoff;
  std::optional<double> tau;
  bool match_tau = false;
  std::uint64_t seed = 1;
  std::size_t trials = 100000;
  std::size_t grid = kDefaultJointBins;
  double smooth = kDefaultSmoothSigma;
};

// Files produced by a subcommand, committed together at the end.
class OutputSet {
 public:
  explicit OutputSet(fs::path dir) : dir_(std::move(dir)) {}

  void add(const std::string& name, std::string content) { files_.emplace_back(name, std::move(content)); }

  void commit() const {
    fs::create_directories(dir_);
    std::vector<fs::path> staged;
    try {
      for (const auto& [name, content] : files_) {
        const fs::path tmp = dir_ / ("." + name + ".tmp");
        std::ofstream out(tmp, std::ios::binary);
        out << content;
        out.close();
        staged.push_back(tmp);
        if (!out) throw Error("failed writing " + tmp.string());
      }
    } catch (...) {
      for (const auto& p : staged) fs::remove(p);
      throw;
    }
    for (std::size_t i = 0; i < files_.size(); ++i) fs::rename(staged[i], dir_ / files_[i].first);
  }

  const fs::path& dir() const { return dir_; }

 private:
  fs::path dir_;
  std::vector<std::pair<std::string, std::string>> files_;
};

fs::path resolve_out_dir(const RunConfig& cfg) {
  if (!cfg.out_dir.empty()) return cfg.out_dir;
  if (const char* env = std::getenv("SIMCAL_OUT_DIR"); env != nullptr && *env != '\0') return env;
  return ".";
}

std::optional<CalibrationModel> optional_model(const RunConfig& cfg) {
  if (cfg.model.empty()) return std::nullopt;
  return load_model(cfg.model);
}

std::vector<ScoredPair> load_scored(const RunConfig& cfg, const std::optional<CalibrationModel>& model) {
  auto pairs = load_pairs(cfg.input);
  if (model) pairs = calibrate_pairs(*model, pairs);
  return pairs;
}

int run_fit(const RunConfig& cfg) {
  const auto method = parse_method(cfg.method);
  if (!method) throw CLI::ValidationError("--method", "unknown method '" + cfg.method + "'");
  const auto pairs = load_pairs(cfg.input);
  const auto model = fit(*method, pairs);
  const auto report = evaluate_all(calibrate_pairs(model, pairs), cfg.bins);

  OutputSet out(resolve_out_dir(cfg));
  out.add("model.json", serialize(model) + "\n");
  out.add("metrics.json", report_to_json(report) + "\n");
  out.commit();
  std::cout << "method=" << method_name(*method) << " n=" << pairs.size() << '\n' << format_report(report);
  for (const auto& f : model.train_meta().diagnostics.flags) std::cout << "flag: " << f << '\n';
  return kExitOk;
}

int run_apply(const RunConfig& cfg) {
  const auto model = load_model(cfg.model);
  std::ifstream in(cfg.input);
  if (!in) throw ValidationError("cannot open input file: " + cfg.input);
  std::ostringstream all;
  all << in.rdbuf();
  const std::string text = all.str();
  const auto first = text.find_first_not_of(" \t\r\n");

  OutputSet out(resolve_out_dir(cfg));
  if (first != std::string::npos && text[first] == '{') {
    std::istringstream is(text);
    const auto pairs = read_pairs_jsonl(is);
    std::ostringstream os;
    write_pairs_jsonl(os, calibrate_pairs(model, pairs));
    out.add("calibrated.jsonl", os.str());
    std::cout << "calibrated " << pairs.size() << " pairs\n";
  } else {
    std::istringstream is(text);
    std::ostringstream os;
    std::string line;
    std::size_t line_no = 0;
    std::size_t count = 0;
    char buf[40];
    while (std::getline(is, line)) {
      ++line_no;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      double x = 0.0;
      try {
        std::size_t used = 0;
        x = std::stod(line, &used);
        if (line.find_first_not_of(" \t\r", used) != std::string::npos) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw ValidationError("line " + std::to_string(line_no) + ": not a number");
      }
      if (!(x >= -1.0 && x <= 1.0)) throw ValidationError("line " + std::to_string(line_no) + ": score out of range [-1, 1]");
      std::snprintf(buf, sizeof(buf), "%.17g\n", model.apply(x));
      os << buf;
      ++count;
    }
    out.add("calibrated.txt", os.str());
    std::cout << "calibrated " << count << " scores\n";
  }
  out.commit();
  return kExitOk;
}

int run_evaluate(const RunConfig& cfg) {
  const auto model = optional_model(cfg);
  const auto pairs = load_scored(cfg, model);
  const auto report = evaluate_all(pairs, cfg.bins);
  OutputSet out(resolve_out_dir(cfg));
  out.add("metrics.json", report_to_json(report) + "\n");
  out.add("metrics.txt", format_report(report));
  out.commit();
  std::cout << format_report(report);
  return kExitOk;
}

int run_compare(const RunConfig& cfg) {
  const auto pairs = load_pairs(cfg.input);
  const auto table = compare_methods(pairs, cfg.bins);
  OutputSet out(resolve_out_dir(cfg));
  out.add("comparison.txt", format_comparison_text(table));
  out.add("comparison.csv", format_comparison_csv(table));
  out.commit();
  std::cout << format_comparison_text(table);
  return kExitOk;
}

int run_threshold(const RunConfig& cfg) {
  const auto raw_pairs = load_pairs(cfg.input);
  const auto raw = hcs_threshold(raw_pairs, cfg.alpha, cfg.cutoff, SimilarityLabel::raw);
  const double raw_cov = guarantee_check(raw_pairs, raw.value, cfg.cutoff);

  nlohmann::json j;
  j["raw"] = nlohmann::json::parse(threshold_to_json(raw, raw_cov));
  std::string text = format_threshold_row(raw, raw_cov) + "\n";

  if (const auto model = optional_model(cfg)) {
    const auto cal_pairs = calibrate_pairs(*model, raw_pairs);
    const auto cal = hcs_threshold(cal_pairs, cfg.alpha, cfg.cutoff, SimilarityLabel::calibrated);
    const double cal_cov = guarantee_check(cal_pairs, cal.value, cfg.cutoff);
    const double mapped = calibrated_threshold(*model, raw.value);
    const double mapped_cov = guarantee_check(cal_pairs, mapped, cfg.cutoff);
    j["calibrated"] = nlohmann::json::parse(threshold_to_json(cal, cal_cov));
    j["calibrated"]["mapped_raw_threshold"] = mapped;
    j["calibrated"]["mapped_coverage"] = mapped_cov;
    text += format_threshold_row(cal, cal_cov) + "\n";
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%-10s g(tau_raw)=%.4f coverage=%.4f\n", "mapped", mapped, mapped_cov);
    text += buf;
  }
  OutputSet out(resolve_out_dir(cfg));
  out.add("threshold.json", j.dump(2) + "\n");
  out.add("threshold.txt", text);
  out.commit();
  std::cout << text;
  return kExitOk;
}

int run_density(const RunConfig& cfg) {
  const auto model = optional_model(cfg);
  const auto pairs = load_scored(cfg, model);
  if (pairs.empty()) throw ValidationError("density: empty input");
  const auto human = human_scores(pairs);
  const auto scores = model_scores(pairs);
  const auto grid = uniform_grid(0.0, 1.0, kDefaultCurvePoints);
  const auto human_curve = kde_1d(human, grid, bandwidth_or_fallback(human));
  const auto model_curve = kde_1d(scores, grid, bandwidth_or_fallback(scores));
  const auto joint = joint_histogram(pairs, cfg.grid, cfg.grid);
  const auto smoothed = gaussian_smooth(joint, cfg.smooth);

  OutputSet out(resolve_out_dir(cfg));
  const auto csv = [](auto writer, const auto& value) {
    std::ostringstream os;
    writer(os, value);
    return os.str();
  };
  out.add("curve_human.csv", csv(write_curve_csv, human_curve));
  out.add("curve_model.csv", csv(write_curve_csv, model_curve));
  out.add("joint_density.csv", csv(write_grid_csv, joint));
  out.add("joint_density_smoothed.csv", csv(write_grid_csv, smoothed));
  out.add("joint_x_edges.csv", csv(write_edges_csv, joint.x_edges));
  out.add("joint_y_edges.csv", csv(write_edges_csv, joint.y_edges));
  const std::string which = model ? "calibrated" : "raw cosine";
  out.add("density.svg", render_density_svg({{"human", "black", &human_curve}, {which, "blue", &model_curve}}, cfg.tau,
                                            "KDE: human vs " + which + " similarity"));
  out.add("heatmap.svg", render_heatmap_svg(smoothed, "Joint density: human vs " + which));
  nlohmann::json meta = {{"n", pairs.size()},
                         {"similarity", model ? "calibrated" : "raw"},
                         {"bandwidth_human", human_curve.bandwidth},
                         {"bandwidth_model", model_curve.bandwidth},
                         {"curve_points", grid.size()},
                         {"joint_bins", cfg.grid},
                         {"smooth_sigma_cells", cfg.smooth}};
  if (cfg.tau) meta["threshold_marker"] = *cfg.tau;
  out.add("density_meta.json", meta.dump(2) + "\n");
  out.commit();
  std::cout << "wrote density outputs for " << pairs.size() << " pairs to " << out.dir().string() << '\n';
  return kExitOk;
}

int run_verify(const RunConfig& cfg) {
  const auto model = load_model(cfg.model);
  const auto suite = run_invariance_suite(model, cfg.seed, cfg.trials);
  std::cout << format_suite_text(suite);
  if (!suite.passed()) return kExitNumeric;
  OutputSet out(resolve_out_dir(cfg));
  out.add("verify.json", suite_to_json(suite) + "\n");
  out.add("verify.txt", format_suite_text(suite));
  out.commit();
  return kExitOk;
}

int run_stability(const RunConfig& cfg) {
  if (!cfg.tau) throw CLI::ValidationError("--tau", "stability requires a threshold");
  auto dataset = load_perturbation_dataset(cfg.input);
  for (const auto& w : dataset.warnings) std::cerr << "warning: " << w << '\n';
  if (!cfg.embeddings.empty()) {
    const auto records = load_embeddings(cfg.embeddings);
    resolve_scores(dataset.pairs, index_embeddings(records));
  }
  const auto model = optional_model(cfg);
  if (cfg.match_tau && !model) throw CLI::ValidationError("--match-tau", "requires --model");
  const double tau = (cfg.match_tau && model) ? calibrated_threshold(*model, *cfg.tau) : *cfg.tau;
  const auto report = evaluate_stability(dataset.pairs, model ? &*model : nullptr, tau);

  OutputSet out(resolve_out_dir(cfg));
  out.add("stability.txt", format_stability_text(report));
  out.add("stability.csv", format_stability_csv(report));
  out.commit();
  std::cout << format_stability_text(report);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"simcal - monotone calibration of cosine similarity against human judgments"};
  app.require_subcommand(1);
  RunConfig cfg;

  const auto add_input = [&](CLI::App* sub, const std::string& what) {
    sub->add_option("--input,-i", cfg.input, what)->required();
  };
  const auto add_out = [&](CLI::App* sub) {
    sub->add_option("--out-dir,-o", cfg.out_dir, "Output directory (default: $SIMCAL_OUT_DIR or .)");
  };
  const auto add_bins = [&](CLI::App* sub) {
    sub->add_option("--bins", cfg.bins, "ECE bin count")->check(CLI::PositiveNumber);
  };

  auto* fit_cmd = app.add_subcommand("fit", "Fit a calibration model on a pairs file");
  add_input(fit_cmd, "Pairs JSONL");
  add_out(fit_cmd);
  add_bins(fit_cmd);
  fit_cmd->add_option("--method,-m", cfg.method, "linear|isotonic|sigmoid|poly2|poly3|poly4|beta");

  auto* apply_cmd = app.add_subcommand("apply", "Apply a model to scores (one per line) or a pairs file");
  add_input(apply_cmd, "Scores text file or pairs JSONL");
  apply_cmd->add_option("--model", cfg.model, "Model JSON")->required();
  add_out(apply_cmd);

  auto* eval_cmd = app.add_subcommand("evaluate", "Alignment metrics, optionally after calibration");
  add_input(eval_cmd, "Pairs JSONL");
  eval_cmd->add_option("--model", cfg.model, "Model JSON");
  add_out(eval_cmd);
  add_bins(eval_cmd);

  auto* cmp_cmd = app.add_subcommand("compare", "Fit and compare every calibration method");
  add_input(cmp_cmd, "Pairs JSONL");
  add_out(cmp_cmd);
  add_bins(cmp_cmd);

  auto* thr_cmd = app.add_subcommand("threshold", "High-confidence similarity threshold");
  add_input(thr_cmd, "Pairs JSONL");
  thr_cmd->add_option("--model", cfg.model, "Model JSON");
  thr_cmd->add_option("--alpha", cfg.alpha, "Tail probability")->check(CLI::Range(0.0, 1.0));
  thr_cmd->add_option("--cutoff", cfg.cutoff, "Human score cutoff (strict)");
  add_out(thr_cmd);

  auto* den_cmd = app.add_subcommand("density", "KDE curves, joint density grid and figures");
  add_input(den_cmd, "Pairs JSONL");
  den_cmd->add_option("--model", cfg.model, "Model JSON");
  den_cmd->add_option("--tau", cfg.tau, "Threshold marker position");
  den_cmd->add_option("--grid", cfg.grid, "Joint grid bins per axis")->check(CLI::PositiveNumber);
  den_cmd->add_option("--smooth", cfg.smooth, "Gaussian smoothing sigma in cells")->check(CLI::NonNegativeNumber);
  add_out(den_cmd);

  auto* ver_cmd = app.add_subcommand("verify", "Randomized order-invariance checks of a model");
  ver_cmd->add_option("--model", cfg.model, "Model JSON")->required();
  ver_cmd->add_option("--seed", cfg.seed, "RNG seed");
  ver_cmd->add_option("--trials", cfg.trials, "Trials per checker")->check(CLI::PositiveNumber);
  add_out(ver_cmd);

  auto* stab_cmd = app.add_subcommand("stability", "Per-perturbation-type local stability report");
  add_input(stab_cmd, "Perturbation dataset JSONL");
  stab_cmd->add_option("--model", cfg.model, "Model JSON");
  stab_cmd->add_option("--tau", cfg.tau, "Stability threshold");
  stab_cmd->add_flag("--match-tau", cfg.match_tau, "Use g(tau) as the threshold when a model is given");
  stab_cmd->add_option("--embeddings", cfg.embeddings, "Embedding file for pairs without raw_score");
  add_out(stab_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*fit_cmd) return run_fit(cfg);
    if (*apply_cmd) return run_apply(cfg);
    if (*eval_cmd) return run_evaluate(cfg);
    if (*cmp_cmd) return run_compare(cfg);
    if (*thr_cmd) return run_threshold(cfg);
    if (*den_cmd) return run_density(cfg);
    if (*ver_cmd) return run_verify(cfg);
    if (*stab_cmd) return run_stability(cfg);
  } catch (const CLI::ParseError& e) {
    std::cerr << "simcal: " << e.what() << '\n';
    return kExitUsage;
  } catch (const NumericError& e) {
    std::cerr << "simcal: numeric error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const ValidationError& e) {
    std::cerr << "simcal: invalid input: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "simcal: " << e.what() << '\n';
    return kExitValidation;
  }
  return kExitUsage;
}
