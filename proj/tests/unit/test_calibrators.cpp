#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles/oracles.hpp"
#include "simcal/calibrators.hpp"
#include "simcal/error.hpp"
#include "unit/support.hpp"

using namespace simcal;

namespace {

std::vector<ScoredPair> on_curve(const std::vector<double>& xs, double (*f)(double)) {
  std::vector<ScoredPair> out;
  for (std::size_t i = 0; i < xs.size(); ++i) out.push_back({std::to_string(i), xs[i], f(xs[i])});
  return out;
}

std::vector<double> grid(double lo, double hi, std::size_t n) {
  std::vector<double> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(lo + (hi - lo) * static_cast<double>(i) / (n - 1.0));
  return out;
}

double unclamped_mean_residual(const CalibrationModel& m, std::span<const ScoredPair> pairs) {
  long double s = 0.0L;
  for (const auto& p : pairs) s += m.apply_unclamped(p.model_score) - p.human_score;
  return static_cast<double>(s / pairs.size());
}

}  // namespace

TEST(Apply, StepFunctionIsLeftAnchored) {
  const auto m = CalibrationModel::isotonic({0.2, 0.6}, {0.1, 0.8});
  EXPECT_EQ(m.apply(0.0), 0.1);
  EXPECT_EQ(m.apply(0.4), 0.1);
  EXPECT_EQ(m.apply(0.6), 0.8);
  EXPECT_EQ(m.apply(0.7), 0.8);
  EXPECT_EQ(m.apply(-1.0), 0.1);
}

TEST(Apply, ClosedForms) {
  EXPECT_DOUBLE_EQ(CalibrationModel::linear(1.0, 0.0).apply(0.3), 0.3);
  EXPECT_DOUBLE_EQ(CalibrationModel::polynomial({0.0, 0.0, 1.0}).apply(-0.5), 0.25);
  EXPECT_EQ(CalibrationModel::linear(1.0, 0.0).apply(-0.4), 0.0);
  EXPECT_DOUBLE_EQ(CalibrationModel::sigmoid(4.0, 0.25).apply(0.25), 0.5);
  // alpha = beta = 1 is the uniform CDF on u
  const auto b = CalibrationModel::beta(1.0, 1.0);
  for (double x : {-0.8, -0.1, 0.0, 0.35, 0.9}) EXPECT_NEAR(b.apply(x), 0.5 * x + 0.5, 1e-14);
}

TEST(Model, InvariantsEnforced) {
  EXPECT_THROW(CalibrationModel::isotonic({}, {}), ValidationError);
  EXPECT_THROW(CalibrationModel::isotonic({0.1, 0.1}, {0.2, 0.3}), ValidationError);
  EXPECT_THROW(CalibrationModel::isotonic({0.1, 0.2}, {0.3, 0.2}), ValidationError);
  EXPECT_THROW(CalibrationModel::isotonic({0.1}, {0.3, 0.4}), ValidationError);
  EXPECT_THROW(CalibrationModel::beta(0.0, 1.0), ValidationError);
  EXPECT_THROW(CalibrationModel::beta(1.0, -2.0), ValidationError);
  EXPECT_THROW(CalibrationModel::linear(std::nan(""), 0.0), ValidationError);
  EXPECT_THROW(CalibrationModel::from_parts(Method::linear, {1.0, 0.0}, {0.5}, {0.5}), ValidationError);
}

TEST(FitIsotonic, AlreadyMonotone) {
  const auto m = fit_isotonic(std::vector<double>{0.1, 0.2, 0.3}, std::vector<double>{0.2, 0.5, 0.9});
  EXPECT_EQ(m.breakpoints(), (std::vector<double>{0.1, 0.2, 0.3}));
  EXPECT_EQ(m.values(), (std::vector<double>{0.2, 0.5, 0.9}));
}

TEST(FitIsotonic, PooledExample) {
  const auto m = fit_isotonic(std::vector<double>{1, 2, 3}, std::vector<double>{3, 1, 2});
  // values clamped into [0, 1] after pooling to 2
  for (double v : m.values()) EXPECT_EQ(v, 1.0);
  const auto u = fit_isotonic(std::vector<double>{0.1, 0.2, 0.3}, std::vector<double>{0.3, 0.1, 0.2});
  for (double v : u.values()) EXPECT_NEAR(v, 0.2, 1e-15);
}

TEST(FitIsotonic, RefitIsIdempotent) {
  std::mt19937_64 rng(31);
  const auto pairs = testing_support::random_pairs(rng, 400);
  const auto m = fit_isotonic(pairs);
  std::vector<ScoredPair> fitted;
  for (const auto& p : pairs) fitted.push_back({p.id, p.model_score, m.apply(p.model_score)});
  const auto again = fit_isotonic(fitted);
  for (double b : m.breakpoints()) ASSERT_NEAR(again.apply(b), m.apply(b), 1e-9);
}

TEST(FitLinear, ExactLineAndFlatTarget) {
  const auto m = fit_linear(on_curve(grid(0.1, 0.5, 9), [](double x) { return 2.0 * x - 0.1; }));
  EXPECT_NEAR(m.params()[0], 2.0, 1e-10);
  EXPECT_NEAR(m.params()[1], -0.1, 1e-10);
  const auto flat = fit_linear(on_curve(grid(-0.5, 0.9, 11), [](double) { return 0.4; }));
  EXPECT_NEAR(flat.params()[0], 0.0, 1e-12);
  EXPECT_NEAR(flat.params()[1], 0.4, 1e-12);
}

TEST(FitLinear, NegativeSlopeFlagged) {
  const auto m = fit_linear(on_curve(grid(0.0, 1.0, 5), [](double x) { return 1.0 - x; }));
  EXPECT_LT(m.params()[0], 0.0);
  EXPECT_TRUE(m.train_meta().diagnostics.has_flag(kFlagNegativeSlope));
}

TEST(FitLinear, ZeroVarianceInput) {
  const std::vector<ScoredPair> same{{"a", 0.5, 0.1}, {"b", 0.5, 0.9}};
  EXPECT_THROW(fit_linear(same), NumericError);
}

TEST(FitPolynomial, ExactQuadratic) {
  const auto m = fit_polynomial(on_curve(grid(-1.0, 1.0, 21), [](double x) { return x * x; }), 2);
  ASSERT_EQ(m.params().size(), 3u);
  EXPECT_NEAR(m.params()[0], 0.0, 1e-8);
  EXPECT_NEAR(m.params()[1], 0.0, 1e-8);
  EXPECT_NEAR(m.params()[2], 1.0, 1e-8);
}

TEST(FitPolynomial, QuarticInterpolatesFivePoints) {
  const std::vector<ScoredPair> pts{{"a", -0.6, 0.1}, {"b", -0.1, 0.7}, {"c", 0.2, 0.3}, {"d", 0.5, 0.8}, {"e", 0.9, 0.6}};
  const auto m = fit_polynomial(pts, 4);
  for (const auto& p : pts) EXPECT_NEAR(m.apply_unclamped(p.model_score), p.human_score, 1e-8);
}

TEST(FitPolynomial, MatchesNormalEquationsOracle) {
  std::mt19937_64 rng(77);
  for (int t = 0; t < 50; ++t) {
    const auto pairs = testing_support::random_pairs(rng, 60, 0.2);
    std::vector<double> x, y;
    for (const auto& p : pairs) {
      x.push_back(p.model_score);
      y.push_back(p.human_score);
    }
    for (std::size_t deg = 2; deg <= 4; ++deg) {
      const auto want = oracle::polyfit_normal_equations(x, y, deg);
      const auto got = fit_polynomial(pairs, deg).params();
      for (std::size_t k = 0; k <= deg; ++k) ASSERT_NEAR(got[k], want[k], 1e-6 * (1.0 + std::fabs(want[k])));
    }
  }
}

TEST(FitPolynomial, RankDeficientRejected) {
  const std::vector<ScoredPair> pts{{"a", 0.1, 0.1}, {"b", 0.1, 0.2}, {"c", 0.5, 0.3}, {"d", 0.5, 0.4}};
  EXPECT_THROW(fit_polynomial(pts, 3), NumericError);
  EXPECT_THROW(fit_polynomial(pts, 5), ValidationError);
  EXPECT_THROW(fit_polynomial(std::span(pts).first(3), 3), ValidationError);
}

TEST(FitSigmoid, RecoversGeneratingParameters) {
  const auto m = fit_sigmoid(on_curve(grid(-0.2, 1.0, 50), [](double x) { return 1.0 / (1.0 + std::exp(-10.0 * (x - 0.5))); }));
  EXPECT_NEAR(m.params()[0], 10.0, 1e-3);
  EXPECT_NEAR(m.params()[1], 0.5, 1e-3);
  EXPECT_TRUE(m.train_meta().diagnostics.converged);
}

TEST(FitSigmoid, FlatTarget) {
  const auto pairs = on_curve(grid(0.0, 1.0, 20), [](double) { return 0.5; });
  const auto m = fit_sigmoid(pairs);
  // slope driven to the flat end; the residual equals the (zero) data variance
  EXPECT_LE(m.params()[0], kSigmoidSlopeMin);
  EXPECT_GE(m.params()[0], 0.0);
  EXPECT_LE(m.train_meta().diagnostics.objective, 1e-12);
  for (const auto& p : pairs) EXPECT_NEAR(m.apply(p.model_score), 0.5, 1e-6);
}

TEST(FitBeta, RecoversGeneratingParameters) {
  const auto truth = CalibrationModel::beta(2.0, 5.0);
  std::vector<ScoredPair> pairs;
  for (double x : grid(-0.95, 0.95, 80)) pairs.push_back({"", x, truth.apply(x)});
  const auto m = fit_beta(pairs);
  EXPECT_NEAR(m.params()[0], 2.0, 1e-2);
  EXPECT_NEAR(m.params()[1], 5.0, 1e-2);
  EXPECT_GT(m.params()[0], 0.0);
}

TEST(Fit, ZeroTrainingBias) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 20; ++t) {
    const auto pairs = testing_support::random_pairs(rng, 200, 0.15);
    EXPECT_LE(std::fabs(evaluate_all(calibrate_pairs(fit(Method::isotonic, pairs), pairs)).mbe), 1e-9);
    for (Method m : {Method::linear, Method::poly2, Method::poly3, Method::poly4}) {
      EXPECT_LE(std::fabs(unclamped_mean_residual(fit(m, pairs), pairs)), 1e-9) << method_name(m);
    }
  }
}

TEST(Fit, MonotoneAndSpearmanPreserving) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const auto pairs = testing_support::random_pairs(rng, 300, 0.2);
  const double base = spearman(pairs);
  for (Method method : {Method::isotonic, Method::linear, Method::sigmoid, Method::beta}) {
    const auto m = fit(method, pairs);
    EXPECT_GE(evaluate_all(calibrate_pairs(m, pairs)).spearman, base - 1e-12) << method_name(method);
    for (int t = 0; t < 100000; ++t) {
      double a = u(rng), b = u(rng);
      if (a > b) std::swap(a, b);
      ASSERT_LE(m.apply(a), m.apply(b)) << method_name(method);
    }
  }
  for (Method method : {Method::sigmoid, Method::beta}) {
    const auto m = fit(method, pairs);
    EXPECT_NEAR(spearman(calibrate_pairs(m, pairs)), base, 1e-12) << method_name(method);
  }
}

TEST(Fit, RecordsDigestAndSize) {
  std::mt19937_64 rng(1);
  const auto pairs = testing_support::random_pairs(rng, 30);
  const auto m = fit(Method::poly3, pairs);
  EXPECT_EQ(m.train_meta().n, 30u);
  EXPECT_EQ(m.train_meta().dataset_digest.rfind("sha256:", 0), 0u);
  EXPECT_EQ(m.train_meta().dataset_digest.size(), 7u + 64u);
  EXPECT_EQ(fit(Method::poly3, pairs).train_meta().dataset_digest, m.train_meta().dataset_digest);
  EXPECT_EQ(m.params().size(), 4u);
}

TEST(Fit, Deterministic) {
  std::mt19937_64 rng(2);
  const auto pairs = testing_support::random_pairs(rng, 150);
  for (Method method : {Method::sigmoid, Method::beta}) {
    EXPECT_EQ(fit(method, pairs).params(), fit(method, pairs).params());
  }
}
