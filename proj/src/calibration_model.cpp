#include "simcal/calibration_model.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/special_functions/beta.hpp>

#include "simcal/error.hpp"

namespace simcal {

namespace {

constexpr std::pair<Method, std::string_view> kMethodNames[] = {
    {Method::linear, "linear"}, {Method::isotonic, "isotonic"}, {Method::sigmoid, "sigmoid"},
    {Method::poly2, "poly2"},   {Method::poly3, "poly3"},       {Method::poly4, "poly4"},
    {Method::beta, "beta"},
};

void require_finite(std::span<const double> xs, const char* what) {
  for (double x : xs) {
    if (!std::isfinite(x)) throw ValidationError(std::string("model ") + what + " contains a non-finite value");
  }
}

Method polynomial_method(std::size_t degree) {
  switch (degree) {
    case 2: return Method::poly2;
    case 3: return Method::poly3;
    case 4: return Method::poly4;
    default: throw ValidationError("polynomial degree must be 2, 3 or 4");
  }
}

}  // namespace

std::string_view method_name(Method m) {
  for (const auto& [method, name] : kMethodNames) {
    if (method == m) return name;
  }
  return "unknown";
}

std::optional<Method> parse_method(std::string_view name) {
  for (const auto& [method, n] : kMethodNames) {
    if (n == name) return method;
  }
  return std::nullopt;
}

std::size_t polynomial_degree(Method m) {
  switch (m) {
    case Method::poly2: return 2;
    case Method::poly3: return 3;
    case Method::poly4: return 4;
    default: return 0;
  }
}

bool FitDiagnostics::has_flag(std::string_view flag) const {
  return std::find(flags.begin(), flags.end(), flag) != flags.end();
}

CalibrationModel CalibrationModel::linear(double a, double b) {
  return from_parts(Method::linear, {a, b}, {}, {});
}

CalibrationModel CalibrationModel::polynomial(std::vector<double> coefficients) {
  if (coefficients.empty()) throw ValidationError("polynomial needs coefficients");
  const Method m = polynomial_method(coefficients.size() - 1);
  return from_parts(m, std::move(coefficients), {}, {});
}

CalibrationModel CalibrationModel::sigmoid(double a, double b) {
  return from_parts(Method::sigmoid, {a, b}, {}, {});
}

CalibrationModel CalibrationModel::beta(double alpha, double beta) {
  return from_parts(Method::beta, {alpha, beta, kBetaInputScale, kBetaInputOffset}, {}, {});
}

CalibrationModel CalibrationModel::isotonic(std::vector<double> breakpoints, std::vector<double> values) {
  return from_parts(Method::isotonic, {}, std::move(breakpoints), std::move(values));
}

CalibrationModel CalibrationModel::from_parts(Method method, std::vector<double> params,
                                              std::vector<double> breakpoints, std::vector<double> values,
                                              double clamp_lo, double clamp_hi, TrainMeta meta) {
  CalibrationModel m;
  m.method_ = method;
  m.params_ = std::move(params);
  m.breakpoints_ = std::move(breakpoints);
  m.values_ = std::move(values);
  m.clamp_lo_ = clamp_lo;
  m.clamp_hi_ = clamp_hi;
  m.meta_ = std::move(meta);
  m.validate();
  return m;
}

CalibrationModel CalibrationModel::with_meta(TrainMeta meta) const {
  CalibrationModel m = *this;
  m.meta_ = std::move(meta);
  return m;
}

void CalibrationModel::validate() const {
  require_finite(params_, "params");
  require_finite(breakpoints_, "breakpoints");
  require_finite(values_, "values");
  if (!std::isfinite(clamp_lo_) || !std::isfinite(clamp_hi_) || clamp_lo_ > clamp_hi_) {
    throw ValidationError("model clamp bounds are invalid");
  }

  const auto expect_params = [&](std::size_t n) {
    if (params_.size() != n) {
      throw ValidationError(std::string(method_name(method_)) + " model expects " + std::to_string(n) +
                            " params, got " + std::to_string(params_.size()));
    }
  };

  switch (method_) {
    case Method::linear:
    case Method::sigmoid:
      expect_params(2);
      break;
    case Method::poly2:
    case Method::poly3:
    case Method::poly4:
      expect_params(polynomial_degree(method_) + 1);
      break;
    case Method::beta:
      expect_params(4);
      if (!(params_[0] > 0.0) || !(params_[1] > 0.0)) {
        throw ValidationError("beta model requires alpha > 0 and beta > 0");
      }
      break;
    case Method::isotonic:
      if (!params_.empty()) throw ValidationError("isotonic model takes no params");
      if (breakpoints_.empty()) throw ValidationError("isotonic model has an empty breakpoint table");
      if (breakpoints_.size() != values_.size()) {
        throw ValidationError("isotonic breakpoints and values differ in length");
      }
      for (std::size_t i = 1; i < breakpoints_.size(); ++i) {
        if (!(breakpoints_[i] > breakpoints_[i - 1])) {
          throw ValidationError("isotonic breakpoints are not strictly ascending");
        }
        if (values_[i] < values_[i - 1]) throw ValidationError("isotonic values are not non-decreasing");
      }
      break;
  }
  if (method_ != Method::isotonic && (!breakpoints_.empty() || !values_.empty())) {
    throw ValidationError(std::string(method_name(method_)) + " model must not carry a breakpoint table");
  }
}

double CalibrationModel::apply_unclamped(double x) const {
  if (!std::isfinite(x)) throw ValidationError("cannot calibrate a non-finite score");
  switch (method_) {
    case Method::linear:
      return params_[0] * x + params_[1];
    case Method::poly2:
    case Method::poly3:
    case Method::poly4: {
      double acc = 0.0;
      for (auto it = params_.rbegin(); it != params_.rend(); ++it) acc = acc * x + *it;
      return acc;
    }
    case Method::sigmoid:
      return 1.0 / (1.0 + std::exp(-params_[0] * (x - params_[1])));
    case Method::beta: {
      const double u =
          std::clamp(params_[2] * x + params_[3], kBetaInputEpsilon, 1.0 - kBetaInputEpsilon);
      return boost::math::ibeta(params_[0], params_[1], u);
    }
    case Method::isotonic: {
      // greatest breakpoint <= x; below the table the first value applies
      const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x);
      if (it == breakpoints_.begin()) return values_.front();
      return values_[static_cast<std::size_t>(std::distance(breakpoints_.begin(), it)) - 1];
    }
  }
  return x;
}

double CalibrationModel::apply(double x) const {
  return std::clamp(apply_unclamped(x), clamp_lo_, clamp_hi_);
}

std::vector<double> CalibrationModel::apply(std::span<const double> xs) const {
  std::vector<double> out(xs.size());
  std::transform(xs.begin(), xs.end(), out.begin(), [this](double x) { return apply(x); });
  return out;
}

}  // namespace simcal
