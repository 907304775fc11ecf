#include "simcal/invariance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <sstream>

#include <json.hpp>

#include "simcal/error.hpp"

namespace simcal {

namespace {

void record(InvarianceReport& r, Witness w) {
  ++r.violations;
  if (!r.witness || w.inputs < r.witness->inputs) r.witness = std::move(w);
}

// Score generator mixing uniform draws on [-1, 1] with exact breakpoints
// and their immediate neighbours.
class ScoreSampler {
 public:
  ScoreSampler(const CalibrationModel& model, std::uint64_t seed) : rng_(seed) {
    for (double b : model.breakpoints()) {
      if (b >= -1.0 && b <= 1.0) anchors_.push_back(b);
    }
  }

  double operator()() {
    if (!anchors_.empty() && coin_(rng_) < 0.25) {
      const double b = anchors_[std::uniform_int_distribution<std::size_t>(0, anchors_.size() - 1)(rng_)];
      switch (std::uniform_int_distribution<int>(0, 2)(rng_)) {
        case 0: return b;
        case 1: return std::max(-1.0, std::nextafter(b, -2.0));
        default: return std::min(1.0, std::nextafter(b, 2.0));
      }
    }
    return uniform_(rng_);
  }

  std::mt19937_64& rng() { return rng_; }

 private:
  std::mt19937_64 rng_;
  std::vector<double> anchors_;
  std::uniform_real_distribution<double> coin_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{-1.0, 1.0};
};

std::string report_line(const char* name, const InvarianceReport& r) {
  char buf[200];
  std::snprintf(buf, sizeof(buf), "%-4s %-28s trials=%zu violations=%zu gained=%zu", r.passed() ? "PASS" : "FAIL",
                name, r.n_trials, r.violations, r.gained);
  std::string line = buf;
  if (r.witness) line += "  witness: " + r.witness->detail;
  return line;
}

nlohmann::json report_json(const InvarianceReport& r) {
  nlohmann::json j = {{"passed", r.passed()}, {"n_trials", r.n_trials}, {"violations", r.violations},
                      {"gained", r.gained}};
  if (r.witness) {
    j["witness"] = {{"inputs", r.witness->inputs}, {"outputs", r.witness->outputs}, {"detail", r.witness->detail}};
  }
  return j;
}

std::string pair_detail(double a, double b, double fa, double fb) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "s=%.17g >= %.17g but g(s)=%.17g < %.17g", a, b, fa, fb);
  return buf;
}

}  // namespace

void merge_into(InvarianceReport& into, const InvarianceReport& other) {
  into.n_trials += other.n_trials;
  into.violations += other.violations;
  into.gained += other.gained;
  if (other.witness && (!into.witness || other.witness->inputs < into.witness->inputs)) {
    into.witness = other.witness;
  }
}

InvarianceReport check_order_preservation(const CalibrationModel& model,
                                          std::span<const std::pair<double, double>> ordered_pairs) {
  InvarianceReport r;
  for (const auto& [a, b] : ordered_pairs) {
    if (!(a >= b)) throw ValidationError("order check: expected a >= b");
    if (a > 1.0 || b < -1.0) throw ValidationError("order check: scores must lie in [-1, 1]");
    ++r.n_trials;
    const double fa = model.apply(a);
    const double fb = model.apply(b);
    if (fa < fb - kViolationTolerance) record(r, {{a, b}, {fa, fb}, pair_detail(a, b, fa, fb)});
    else if (a > b && fa == fb) ++r.gained;
  }
  return r;
}

InvarianceReport check_angular_order(const CalibrationModel& model,
                                     std::span<const std::pair<double, double>> angle_pairs) {
  InvarianceReport r;
  for (const auto& [t1, t2] : angle_pairs) {
    if (!(t1 >= 0.0 && t1 <= t2 && t2 <= std::numbers::pi)) {
      throw ValidationError("angular check: expected 0 <= t1 <= t2 <= pi");
    }
    ++r.n_trials;
    const double a = std::cos(t1);
    const double b = std::cos(t2);
    const double fa = model.apply(a);
    const double fb = model.apply(b);
    if (fa < fb - kViolationTolerance) record(r, {{t1, t2}, {fa, fb}, pair_detail(a, b, fa, fb)});
    else if (a > b && fa == fb) ++r.gained;
  }
  return r;
}

InvarianceReport check_nn_preservation(const CalibrationModel& model, std::span<const double> candidate_scores) {
  if (candidate_scores.empty()) throw ValidationError("nearest-neighbour check: empty candidate list");
  InvarianceReport r;
  r.n_trials = 1;
  const double raw_max = *std::max_element(candidate_scores.begin(), candidate_scores.end());
  const auto calibrated = model.apply(candidate_scores);
  const double cal_max = *std::max_element(calibrated.begin(), calibrated.end());
  std::size_t raw_ties = 0;
  std::size_t cal_ties = 0;
  bool violated = false;
  for (std::size_t i = 0; i < candidate_scores.size(); ++i) {
    const bool raw_nn = candidate_scores[i] == raw_max;
    const bool cal_nn = calibrated[i] >= cal_max - kViolationTolerance;
    raw_ties += raw_nn;
    cal_ties += cal_nn;
    if (raw_nn && !cal_nn) violated = true;
  }
  if (violated) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "raw nearest neighbour (s=%.17g) is not a calibrated nearest neighbour", raw_max);
    record(r, {std::vector<double>(candidate_scores.begin(), candidate_scores.end()), calibrated, buf});
  } else if (cal_ties > raw_ties) {
    r.gained = cal_ties - raw_ties;
  }
  return r;
}

InvarianceReport check_threshold_graph(const CalibrationModel& model, const ScoreMatrix& scores, double tau) {
  if (scores.data.size() != scores.n * scores.n) throw ValidationError("threshold graph: matrix is not square");
  for (std::size_t i = 0; i < scores.n; ++i) {
    for (std::size_t j = i + 1; j < scores.n; ++j) {
      if (scores.at(i, j) != scores.at(j, i)) throw ValidationError("threshold graph: matrix is not symmetric");
    }
  }
  InvarianceReport r;
  const double tau_cal = model.apply(tau);
  for (std::size_t i = 0; i < scores.n; ++i) {
    for (std::size_t j = i + 1; j < scores.n; ++j) {
      ++r.n_trials;
      const double s = scores.at(i, j);
      const double fs = model.apply(s);
      const bool raw_edge = s >= tau;
      const bool cal_edge = fs >= tau_cal - kViolationTolerance;
      if (raw_edge && !cal_edge) {
        char buf[200];
        std::snprintf(buf, sizeof(buf), "edge (%zu,%zu) s=%.17g >= tau=%.17g destroyed: g(s)=%.17g < g(tau)=%.17g", i,
                      j, s, tau, fs, tau_cal);
        record(r, {{s, tau}, {fs, tau_cal}, buf});
      } else if (!raw_edge && cal_edge) {
        ++r.gained;
      }
    }
  }
  return r;
}

bool InvarianceSuite::passed() const {
  return order.passed() && angular.passed() && nearest_neighbor.passed() && threshold_graph.passed();
}

InvarianceSuite run_invariance_suite(const CalibrationModel& model, std::uint64_t seed, std::size_t trials) {
  InvarianceSuite suite;
  suite.seed = seed;
  suite.trials = trials;
  ScoreSampler sample(model, seed);
  auto& rng = sample.rng();

  std::vector<std::pair<double, double>> pairs;
  pairs.reserve(trials);
  for (std::size_t t = 0; t < trials; ++t) {
    double a = sample();
    double b = sample();
    if (a < b) std::swap(a, b);
    pairs.emplace_back(a, b);
  }
  suite.order = check_order_preservation(model, pairs);

  std::uniform_real_distribution<double> angle(0.0, std::numbers::pi);
  pairs.clear();
  for (std::size_t t = 0; t < trials; ++t) {
    double t1 = angle(rng);
    double t2 = angle(rng);
    if (t1 > t2) std::swap(t1, t2);
    pairs.emplace_back(t1, t2);
  }
  suite.angular = check_angular_order(model, pairs);

  std::uniform_int_distribution<std::size_t> set_size(1, 16);
  std::vector<double> candidates;
  for (std::size_t t = 0; t < trials; ++t) {
    candidates.resize(set_size(rng));
    for (double& c : candidates) c = sample();
    // duplicate the maximum now and then so raw ties occur
    if (candidates.size() > 1 && std::uniform_int_distribution<int>(0, 3)(rng) == 0) {
      candidates.back() = *std::max_element(candidates.begin(), candidates.end());
    }
    merge_into(suite.nearest_neighbor, check_nn_preservation(model, candidates));
  }

  std::uniform_int_distribution<std::size_t> matrix_size(2, 20);
  ScoreMatrix m;
  InvarianceReport graph;
  for (std::size_t t = 0; t < trials; ++t) {
    m.n = matrix_size(rng);
    m.data.assign(m.n * m.n, 1.0);
    for (std::size_t i = 0; i < m.n; ++i) {
      for (std::size_t j = i + 1; j < m.n; ++j) m.data[i * m.n + j] = m.data[j * m.n + i] = sample();
    }
    const double tau = sample();
    merge_into(graph, check_threshold_graph(model, m, tau));
  }
  suite.threshold_graph = graph;
  return suite;
}

std::string format_suite_text(const InvarianceSuite& suite) {
  std::ostringstream os;
  os << "seed=" << suite.seed << " trials=" << suite.trials << '\n';
  os << report_line("order preservation", suite.order) << '\n';
  os << report_line("angular order", suite.angular) << '\n';
  os << report_line("nearest-neighbour", suite.nearest_neighbor) << '\n';
  os << report_line("threshold graph", suite.threshold_graph) << '\n';
  os << (suite.passed() ? "ALL PASS" : "FAILED") << '\n';
  return os.str();
}

std::string suite_to_json(const InvarianceSuite& suite) {
  const nlohmann::json j = {{"seed", suite.seed},
                            {"trials", suite.trials},
                            {"passed", suite.passed()},
                            {"order_preservation", report_json(suite.order)},
                            {"angular_order", report_json(suite.angular)},
                            {"nearest_neighbor", report_json(suite.nearest_neighbor)},
                            {"threshold_graph", report_json(suite.threshold_graph)}};
  return j.dump(2);
}

}  // namespace simcal
