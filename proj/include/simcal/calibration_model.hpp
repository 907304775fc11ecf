#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace simcal {

enum class Method { linear, isotonic, sigmoid, poly2, poly3, poly4, beta };

std::string_view method_name(Method m);
std::optional<Method> parse_method(std::string_view name);
std::size_t polynomial_degree(Method m);  // 0 for non-polynomial methods

/// What the fitting routine observed; carried along in the model file.
struct FitDiagnostics {
  bool converged = true;
  double objective = 0.0;  // training sum of squared residuals
  double gradient_norm = 0.0;
  std::size_t iterations = 0;
  std::vector<std::string> flags;

  bool has_flag(std::string_view flag) const;
};

struct TrainMeta {
  std::string dataset_digest;
  std::size_t n = 0;
  FitDiagnostics diagnostics;
};

// Input map used by the beta calibrator: u = clamp(scale * x + offset, eps, 1 - eps).
inline constexpr double kBetaInputScale = 0.5;
inline constexpr double kBetaInputOffset = 0.5;
inline constexpr double kBetaInputEpsilon = 1e-6;

/// A fitted similarity transform g. Immutable after construction; every
/// factory validates its invariants and throws ValidationError otherwise.
///
/// Parameter layout per method:
///   linear      a, b                 g(x) = a x + b
///   polyK       a0 .. aK             g(x) = sum a_i x^i
///   sigmoid     a, b                 g(x) = 1 / (1 + exp(-a (x - b)))
///   beta        alpha, beta, scale, offset
///                                    g(x) = BetaCDF_{alpha,beta}(u(x))
///   isotonic    (none)               left-anchored step function over
///                                    breakpoints/values
/// All outputs are clamped to [clamp_lo, clamp_hi].
class CalibrationModel {
 public:
  static CalibrationModel linear(double a, double b);
  static CalibrationModel polynomial(std::vector<double> coefficients);
  static CalibrationModel sigmoid(double a, double b);
  static CalibrationModel beta(double alpha, double beta);
  static CalibrationModel isotonic(std::vector<double> breakpoints, std::vector<double> values);

  /// Generic constructor used by deserialization.
  static CalibrationModel from_parts(Method method, std::vector<double> params, std::vector<double> breakpoints,
                                     std::vector<double> values, double clamp_lo = 0.0, double clamp_hi = 1.0,
                                     TrainMeta meta = {});

  Method method() const { return method_; }
  const std::vector<double>& params() const { return params_; }
  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<double>& values() const { return values_; }
  double clamp_lo() const { return clamp_lo_; }
  double clamp_hi() const { return clamp_hi_; }
  const TrainMeta& train_meta() const { return meta_; }

  CalibrationModel with_meta(TrainMeta meta) const;

  /// Calibrated similarity for a raw cosine x.
  double apply(double x) const;
  std::vector<double> apply(std::span<const double> xs) const;

  /// The transform before output clamping.
  double apply_unclamped(double x) const;

 private:
  CalibrationModel() = default;
  void validate() const;

  Method method_ = Method::linear;
  std::vector<double> params_;
  std::vector<double> breakpoints_;
  std::vector<double> values_;
  double clamp_lo_ = 0.0;
  double clamp_hi_ = 1.0;
  TrainMeta meta_;
};

}  // namespace simcal
