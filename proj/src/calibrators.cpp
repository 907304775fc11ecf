#include "simcal/calibrators.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>

#include <Eigen/Dense>
#include <boost/math/special_functions/beta.hpp>

#include "simcal/digest.hpp"
#include "simcal/error.hpp"
#include "simcal/isotonic.hpp"

namespace simcal {

namespace {

using Params = std::array<double, 2>;

void require_min_size(std::span<const ScoredPair> pairs, std::size_t n, const char* what) {
  if (pairs.size() < n) {
    throw ValidationError(std::string(what) + ": need at least " + std::to_string(n) + " pairs");
  }
}

std::vector<double> log_space(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
  }
  return out;
}

std::vector<double> lin_space(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return out;
}

// Residuals r_i(p) and, when jac is non-null, their Jacobian (n x 2).
using ResidualFn = std::function<void(const Params&, std::vector<double>&, std::vector<Params>*)>;

struct RefineResult {
  Params params{};
  double objective = 0.0;
  double gradient_norm = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

double sum_squares(const std::vector<double>& r) {
  long double s = 0.0L;
  for (double x : r) s += static_cast<long double>(x) * x;
  return static_cast<double>(s);
}

// Levenberg-Marquardt on a two-parameter least-squares problem. `project`
// maps a trial point back into the feasible set; `free_gradient` zeroes
// gradient components blocked by an active bound.
RefineResult levenberg_marquardt(const ResidualFn& residuals, Params start,
                                 const std::function<Params(Params)>& project,
                                 const std::function<Params(const Params&, Params)>& free_gradient) {
  constexpr std::size_t kMaxIterations = 500;
  constexpr double kEps = std::numeric_limits<double>::epsilon();
  std::vector<double> r;
  std::vector<Params> jac;

  RefineResult res;
  res.params = project(start);
  residuals(res.params, r, &jac);
  res.objective = sum_squares(r);
  double lambda = 1e-3;

  for (std::size_t it = 0; it < kMaxIterations; ++it) {
    long double jtj00 = 0.0L, jtj01 = 0.0L, jtj11 = 0.0L, g0 = 0.0L, g1 = 0.0L;
    for (std::size_t i = 0; i < r.size(); ++i) {
      jtj00 += static_cast<long double>(jac[i][0]) * jac[i][0];
      jtj01 += static_cast<long double>(jac[i][0]) * jac[i][1];
      jtj11 += static_cast<long double>(jac[i][1]) * jac[i][1];
      g0 += static_cast<long double>(jac[i][0]) * r[i];
      g1 += static_cast<long double>(jac[i][1]) * r[i];
    }
    const Params grad = free_gradient(res.params, {2.0 * static_cast<double>(g0), 2.0 * static_cast<double>(g1)});
    res.gradient_norm = std::hypot(grad[0], grad[1]);
    res.iterations = it;
    if (res.gradient_norm <= kRefineGradientTolerance) {
      res.converged = true;
      return res;
    }

    bool improved = false;
    while (lambda < 1e20) {
      const double a00 = static_cast<double>(jtj00) + lambda * std::max(static_cast<double>(jtj00), 1e-12);
      const double a11 = static_cast<double>(jtj11) + lambda * std::max(static_cast<double>(jtj11), 1e-12);
      const double a01 = static_cast<double>(jtj01);
      const double det = a00 * a11 - a01 * a01;
      if (det == 0.0 || !std::isfinite(det)) {
        lambda *= 10.0;
        continue;
      }
      const double b0 = -static_cast<double>(g0);
      const double b1 = -static_cast<double>(g1);
      const Params trial = project({res.params[0] + (a11 * b0 - a01 * b1) / det,
                                    res.params[1] + (a00 * b1 - a01 * b0) / det});
      std::vector<double> r_trial;
      residuals(trial, r_trial, nullptr);
      const double obj = sum_squares(r_trial);
      if (std::isfinite(obj) && obj < res.objective) {
        res.params = trial;
        res.objective = obj;
        lambda = std::max(lambda / 10.0, 1e-15);
        improved = true;
        break;
      }
      // Near the optimum the decrease drops below the rounding of the
      // objective; there a step that does not measurably raise it but
      // shrinks the gradient still counts as progress.
      if (std::isfinite(obj) && obj <= res.objective * (1.0 + 64.0 * kEps) && trial != res.params) {
        std::vector<Params> jac_trial;
        residuals(trial, r_trial, &jac_trial);
        long double t0 = 0.0L, t1 = 0.0L;
        for (std::size_t i = 0; i < r_trial.size(); ++i) {
          t0 += static_cast<long double>(jac_trial[i][0]) * r_trial[i];
          t1 += static_cast<long double>(jac_trial[i][1]) * r_trial[i];
        }
        const Params g_trial = free_gradient(trial, {2.0 * static_cast<double>(t0), 2.0 * static_cast<double>(t1)});
        if (std::hypot(g_trial[0], g_trial[1]) < 0.5 * res.gradient_norm) {
          res.params = trial;
          res.objective = std::min(obj, res.objective);
          improved = true;
          break;
        }
      }
      if (trial == res.params) break;
      lambda *= 10.0;
    }
    if (!improved) break;
    residuals(res.params, r, &jac);
  }
  return res;
}

void attach_refine_diagnostics(FitDiagnostics& d, const RefineResult& refined) {
  d.converged = refined.converged;
  d.objective = refined.objective;
  d.gradient_norm = refined.gradient_norm;
  d.iterations = refined.iterations;
  if (!refined.converged) d.flags.emplace_back(kFlagNotConverged);
}

CalibrationModel attach(const CalibrationModel& model, FitDiagnostics d, std::size_t n) {
  TrainMeta meta;
  meta.n = n;
  meta.diagnostics = std::move(d);
  return model.with_meta(std::move(meta));
}

// Bounds on log(alpha), log(beta) during refinement (about 1e-4 .. 1e4).
constexpr double kLogShapeMin = -9.2;
constexpr double kLogShapeMax = 9.2;

double sigmoid_value(double a, double b, double x) { return 1.0 / (1.0 + std::exp(-a * (x - b))); }

double beta_value(double alpha, double beta, double u) { return boost::math::ibeta(alpha, beta, u); }

double beta_input(double x) {
  return std::clamp(kBetaInputScale * x + kBetaInputOffset, kBetaInputEpsilon, 1.0 - kBetaInputEpsilon);
}

}  // namespace

CalibrationModel fit_isotonic(std::span<const double> x, std::span<const double> y, std::span<const double> w) {
  if (x.size() < 2) throw ValidationError("fit_isotonic: need at least 2 points");
  auto iso = isotonic_regression(x, y, w);
  for (double& v : iso.fitted) v = std::clamp(v, 0.0, 1.0);

  FitDiagnostics d;
  long double sse = 0.0L;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto it = std::lower_bound(iso.x.begin(), iso.x.end(), x[i]);
    const double fit = iso.fitted[static_cast<std::size_t>(it - iso.x.begin())];
    const double wi = w.empty() ? 1.0 : w[i];
    sse += wi * (static_cast<long double>(fit) - y[i]) * (static_cast<long double>(fit) - y[i]);
  }
  d.objective = static_cast<double>(sse);
  return attach(CalibrationModel::isotonic(std::move(iso.x), std::move(iso.fitted)), std::move(d), x.size());
}

CalibrationModel fit_isotonic(std::span<const ScoredPair> pairs) {
  require_min_size(pairs, 2, "fit_isotonic");
  const auto x = model_scores(pairs);
  const auto y = human_scores(pairs);
  return fit_isotonic(x, y);
}

CalibrationModel fit_linear(std::span<const ScoredPair> pairs) {
  require_min_size(pairs, 2, "fit_linear");
  long double mx = 0.0L, my = 0.0L;
  for (const auto& p : pairs) {
    mx += p.model_score;
    my += p.human_score;
  }
  const auto n = static_cast<long double>(pairs.size());
  mx /= n;
  my /= n;
  long double sxx = 0.0L, sxy = 0.0L;
  for (const auto& p : pairs) {
    const long double dx = p.model_score - mx;
    sxx += dx * dx;
    sxy += dx * (p.human_score - my);
  }
  if (sxx == 0.0L) throw NumericError("fit_linear: model scores have zero variance");
  const long double a = sxy / sxx;
  const long double b = my - a * mx;

  FitDiagnostics d;
  if (a < 0.0L) d.flags.emplace_back(kFlagNegativeSlope);
  long double sse = 0.0L;
  for (const auto& p : pairs) {
    const long double e = a * p.model_score + b - p.human_score;
    sse += e * e;
  }
  d.objective = static_cast<double>(sse);
  return attach(CalibrationModel::linear(static_cast<double>(a), static_cast<double>(b)), std::move(d),
                pairs.size());
}

CalibrationModel fit_polynomial(std::span<const ScoredPair> pairs, std::size_t degree) {
  if (degree < 2 || degree > 4) throw ValidationError("fit_polynomial: degree must be 2, 3 or 4");
  require_min_size(pairs, degree + 1, "fit_polynomial");
  const auto n = static_cast<Eigen::Index>(pairs.size());
  const auto k = static_cast<Eigen::Index>(degree + 1);
  Eigen::MatrixXd design(n, k);
  Eigen::VectorXd target(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = pairs[static_cast<std::size_t>(i)].model_score;
    double pw = 1.0;
    for (Eigen::Index j = 0; j < k; ++j) {
      design(i, j) = pw;
      pw *= x;
    }
    target(i) = pairs[static_cast<std::size_t>(i)].human_score;
  }
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (qr.rank() < k) throw NumericError("fit_polynomial: rank-deficient design");
  const Eigen::VectorXd coef = qr.solve(target);

  FitDiagnostics d;
  d.objective = (design * coef - target).squaredNorm();
  std::vector<double> coefficients(coef.data(), coef.data() + coef.size());
  return attach(CalibrationModel::polynomial(std::move(coefficients)), std::move(d), pairs.size());
}

CalibrationModel fit_sigmoid(std::span<const ScoredPair> pairs) {
  require_min_size(pairs, 2, "fit_sigmoid");
  const auto x = model_scores(pairs);
  const auto y = human_scores(pairs);

  Params best{kSigmoidSlopeMin, 0.0};
  double best_obj = std::numeric_limits<double>::infinity();
  for (double a : log_space(kSigmoidSlopeMin, kSigmoidSlopeMax, kFitGridSize)) {
    for (double b : lin_space(kSigmoidShiftMin, kSigmoidShiftMax, kFitGridSize)) {
      long double sse = 0.0L;
      for (std::size_t i = 0; i < x.size(); ++i) {
        const long double e = sigmoid_value(a, b, x[i]) - y[i];
        sse += e * e;
      }
      if (static_cast<double>(sse) < best_obj) {
        best_obj = static_cast<double>(sse);
        best = {a, b};
      }
    }
  }

  const ResidualFn residuals = [&](const Params& p, std::vector<double>& r, std::vector<Params>* jac) {
    r.resize(x.size());
    if (jac) jac->resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double s = sigmoid_value(p[0], p[1], x[i]);
      r[i] = s - y[i];
      if (jac) {
        const double ds = s * (1.0 - s);
        (*jac)[i] = {ds * (x[i] - p[1]), -p[0] * ds};
      }
    }
  };
  // slope is kept non-negative so the fitted curve is non-decreasing
  const auto project = [](Params p) { return Params{std::max(p[0], 0.0), p[1]}; };
  const auto free_gradient = [](const Params& p, Params g) {
    if (p[0] == 0.0 && g[0] > 0.0) g[0] = 0.0;
    return g;
  };
  const RefineResult refined = levenberg_marquardt(residuals, best, project, free_gradient);

  FitDiagnostics d;
  attach_refine_diagnostics(d, refined);
  return attach(CalibrationModel::sigmoid(refined.params[0], refined.params[1]), std::move(d), pairs.size());
}

CalibrationModel fit_beta(std::span<const ScoredPair> pairs) {
  require_min_size(pairs, 2, "fit_beta");
  std::vector<double> u(pairs.size());
  std::vector<double> y(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    u[i] = beta_input(pairs[i].model_score);
    y[i] = pairs[i].human_score;
  }

  // The grid stage runs on at most kGridPoints weighted chunks of the
  // u-sorted data; the refinement always uses every point.
  constexpr std::size_t kGridPoints = 128;
  std::vector<double> gu, gy, gw;
  {
    std::vector<std::size_t> order(u.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return u[a] < u[b]; });
    const std::size_t chunks = std::min(kGridPoints, u.size());
    for (std::size_t c = 0; c < chunks; ++c) {
      const std::size_t lo = c * u.size() / chunks;
      const std::size_t hi = (c + 1) * u.size() / chunks;
      long double su = 0.0L, sy = 0.0L;
      for (std::size_t k = lo; k < hi; ++k) {
        su += u[order[k]];
        sy += y[order[k]];
      }
      const auto cnt = static_cast<long double>(hi - lo);
      gu.push_back(static_cast<double>(su / cnt));
      gy.push_back(static_cast<double>(sy / cnt));
      gw.push_back(static_cast<double>(cnt));
    }
  }

  Params best{1.0, 1.0};
  double best_obj = std::numeric_limits<double>::infinity();
  const auto shapes = log_space(kBetaShapeMin, kBetaShapeMax, kFitGridSize);
  for (double alpha : shapes) {
    for (double beta : shapes) {
      long double sse = 0.0L;
      for (std::size_t i = 0; i < gu.size(); ++i) {
        const long double e = beta_value(alpha, beta, gu[i]) - gy[i];
        sse += gw[i] * e * e;
      }
      if (static_cast<double>(sse) < best_obj) {
        best_obj = static_cast<double>(sse);
        best = {alpha, beta};
      }
    }
  }

  // Refinement in log-shape coordinates keeps both shapes positive.
  constexpr double kStep = 1e-6;
  const ResidualFn residuals = [&](const Params& t, std::vector<double>& r, std::vector<Params>* jac) {
    const double alpha = std::exp(t[0]);
    const double beta = std::exp(t[1]);
    r.resize(u.size());
    if (jac) jac->resize(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
      r[i] = beta_value(alpha, beta, u[i]) - y[i];
      if (jac) {
        const double da = (beta_value(std::exp(t[0] + kStep), beta, u[i]) -
                           beta_value(std::exp(t[0] - kStep), beta, u[i])) / (2.0 * kStep);
        const double db = (beta_value(alpha, std::exp(t[1] + kStep), u[i]) -
                           beta_value(alpha, std::exp(t[1] - kStep), u[i])) / (2.0 * kStep);
        (*jac)[i] = {da, db};
      }
    }
  };
  const auto project = [](Params t) {
    return Params{std::clamp(t[0], kLogShapeMin, kLogShapeMax), std::clamp(t[1], kLogShapeMin, kLogShapeMax)};
  };
  const auto free_gradient = [](const Params& t, Params g) {
    for (std::size_t k = 0; k < 2; ++k) {
      if ((t[k] == kLogShapeMin && g[k] > 0.0) || (t[k] == kLogShapeMax && g[k] < 0.0)) g[k] = 0.0;
    }
    return g;
  };
  const RefineResult refined =
      levenberg_marquardt(residuals, {std::log(best[0]), std::log(best[1])}, project, free_gradient);

  FitDiagnostics d;
  attach_refine_diagnostics(d, refined);
  return attach(CalibrationModel::beta(std::exp(refined.params[0]), std::exp(refined.params[1])), std::move(d),
                pairs.size());
}

CalibrationModel fit(Method method, std::span<const ScoredPair> pairs) {
  CalibrationModel model = [&] {
    switch (method) {
      case Method::linear: return fit_linear(pairs);
      case Method::isotonic: return fit_isotonic(pairs);
      case Method::sigmoid: return fit_sigmoid(pairs);
      case Method::beta: return fit_beta(pairs);
      case Method::poly2:
      case Method::poly3:
      case Method::poly4: return fit_polynomial(pairs, polynomial_degree(method));
    }
    throw ValidationError("unknown calibration method");
  }();
  TrainMeta meta = model.train_meta();
  meta.dataset_digest = pairs_digest(pairs);
  meta.n = pairs.size();
  return model.with_meta(std::move(meta));
}

std::vector<ScoredPair> calibrate_pairs(const CalibrationModel& model, std::span<const ScoredPair> pairs) {
  std::vector<ScoredPair> out(pairs.begin(), pairs.end());
  for (auto& p : out) p.model_score = model.apply(p.model_score);
  return out;
}

}  // namespace simcal
