#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "simcal/calibration_model.hpp"

namespace simcal {

// A calibrated value may fall below its comparand by at most this much
// before it counts as an inversion.
inline constexpr double kViolationTolerance = 1e-12;

/// A failing instance: the raw scores involved and their calibrated images.
struct Witness {
  std::vector<double> inputs;
  std::vector<double> outputs;
  std::string detail;
};

struct InvarianceReport {
  std::size_t n_trials = 0;
  std::size_t violations = 0;
  std::size_t gained = 0;  // ties or edges created by plateaus (allowed)
  std::optional<Witness> witness;

  bool passed() const { return violations == 0; }
};

/// Sums counts; keeps the lexicographically smaller witness (by inputs).
void merge_into(InvarianceReport& into, const InvarianceReport& other);

/// Square symmetric similarity matrix, row-major.
struct ScoreMatrix {
  std::size_t n = 0;
  std::vector<double> data;

  double at(std::size_t i, std::size_t j) const { return data[i * n + j]; }
};

/// Each pair (a, b) must satisfy a >= b. Counts pairs with apply(a) < apply(b).
InvarianceReport check_order_preservation(const CalibrationModel& model,
                                          std::span<const std::pair<double, double>> ordered_pairs);

/// Pairs of angles (t1, t2) with 0 <= t1 <= t2 <= pi, checked through cos.
InvarianceReport check_angular_order(const CalibrationModel& model,
                                     std::span<const std::pair<double, double>> angle_pairs);

/// One candidate set around a center: every raw argmax must stay in the
/// calibrated argmax set.
InvarianceReport check_nn_preservation(const CalibrationModel& model, std::span<const double> candidate_scores);

/// Raw edges {(i, j): s_ij >= tau, i < j} must all survive as calibrated
/// edges at apply(tau). n_trials counts vertex pairs examined. Throws
/// ValidationError on a non-square or non-symmetric matrix.
InvarianceReport check_threshold_graph(const CalibrationModel& model, const ScoreMatrix& scores, double tau);

struct InvarianceSuite {
  std::uint64_t seed = 0;
  std::size_t trials = 0;
  InvarianceReport order;
  InvarianceReport angular;
  InvarianceReport nearest_neighbor;
  InvarianceReport threshold_graph;

  bool passed() const;
};

/// Randomized run of all checkers: `trials` ordered pairs, angle pairs,
/// candidate sets and random symmetric matrices each. Draws near the
/// model's breakpoints are over-sampled so plateaus are exercised.
/// Deterministic for a given seed.
InvarianceSuite run_invariance_suite(const CalibrationModel& model, std::uint64_t seed, std::size_t trials);

std::string format_suite_text(const InvarianceSuite& suite);
std::string suite_to_json(const InvarianceSuite& suite);

}  // namespace simcal
