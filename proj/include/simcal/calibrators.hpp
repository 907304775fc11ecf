#pragma once

#include <span>
#include <vector>

#include "simcal/calibration_model.hpp"
#include "simcal/metrics.hpp"

namespace simcal {

// Grid used to seed the sigmoid and beta refinements.
inline constexpr std::size_t kFitGridSize = 64;
inline constexpr double kSigmoidSlopeMin = 0.1;
inline constexpr double kSigmoidSlopeMax = 50.0;
inline constexpr double kSigmoidShiftMin = -1.0;
inline constexpr double kSigmoidShiftMax = 1.0;
inline constexpr double kBetaShapeMin = 0.05;
inline constexpr double kBetaShapeMax = 100.0;
// Refinement stops once the SSE gradient norm falls to this value.
inline constexpr double kRefineGradientTolerance = 1e-8;

// Diagnostic flags written into FitDiagnostics::flags.
inline constexpr const char* kFlagNegativeSlope = "negative_slope";
inline constexpr const char* kFlagNotConverged = "refinement_not_converged";

/// Pool-adjacent-violators fit of human on model scores; values clamped to [0, 1].
CalibrationModel fit_isotonic(std::span<const ScoredPair> pairs);
CalibrationModel fit_isotonic(std::span<const double> x, std::span<const double> y,
                              std::span<const double> w = {});

/// Ordinary least squares y = a x + b. A negative slope is allowed but flagged.
CalibrationModel fit_linear(std::span<const ScoredPair> pairs);

/// Least-squares polynomial of degree 2, 3 or 4 (QR on the Vandermonde design).
CalibrationModel fit_polynomial(std::span<const ScoredPair> pairs, std::size_t degree);

CalibrationModel fit_sigmoid(std::span<const ScoredPair> pairs);
CalibrationModel fit_beta(std::span<const ScoredPair> pairs);

/// Dispatch by method; also records the dataset digest and n in train_meta.
CalibrationModel fit(Method method, std::span<const ScoredPair> pairs);

/// Copies of pairs with model_score replaced by the calibrated score.
std::vector<ScoredPair> calibrate_pairs(const CalibrationModel& model, std::span<const ScoredPair> pairs);

}  // namespace simcal
