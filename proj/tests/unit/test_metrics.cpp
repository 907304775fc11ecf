#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles/oracles.hpp"
#include "simcal/error.hpp"
#include "simcal/metrics.hpp"
#include "unit/support.hpp"

using namespace simcal;

namespace {

std::vector<ScoredPair> make_pairs(const std::vector<double>& m, const std::vector<double>& h) {
  std::vector<ScoredPair> out;
  for (std::size_t i = 0; i < m.size(); ++i) out.push_back({std::to_string(i), m[i], h[i]});
  return out;
}

}  // namespace

TEST(Rmse, KnownValues) {
  EXPECT_EQ(rmse(make_pairs({0.1, 0.5, 0.9}, {0.1, 0.5, 0.9})), 0.0);
  EXPECT_DOUBLE_EQ(rmse(make_pairs({1.0, 0.0}, {0.0, 1.0})), 1.0);
}

TEST(Mbe, ConstantShift) {
  EXPECT_EQ(mbe(make_pairs({0.2, 0.4}, {0.2, 0.4})), 0.0);
  EXPECT_NEAR(mbe(make_pairs({0.3, 0.5, 0.7}, {0.2, 0.4, 0.6})), 0.1, 1e-15);
}

TEST(Ece, PerfectAndSingleBin) {
  const auto perfect = make_pairs({0.05, 0.35, 0.95}, {0.05, 0.35, 0.95});
  EXPECT_NEAR(ece(perfect).ece, 0.0, 1e-15);
  std::mt19937_64 rng(1);
  for (int t = 0; t < 200; ++t) {
    const auto pairs = testing_support::random_pairs(rng, 40, 0.3);
    EXPECT_NEAR(ece(pairs, 1).ece, std::fabs(mbe(pairs)), 1e-12);
  }
}

TEST(Ece, BinsCoverAllPairsAndRecompute) {
  std::mt19937_64 rng(2);
  const auto pairs = testing_support::random_pairs(rng, 500, 0.4);
  const auto r = ece(pairs, 10);
  std::size_t total = 0;
  for (const auto& b : r.bins) total += b.count;
  EXPECT_EQ(total, pairs.size());
  EXPECT_NEAR(ece_from_bins(r.bins), r.ece, 1e-12);
  ASSERT_EQ(r.bins.size(), 10u);
  EXPECT_EQ(r.bins.front().lower, 0.0);
  EXPECT_EQ(r.bins.back().upper, 1.0);
}

TEST(Ece, NegativeScoresLandInFirstBin) {
  const auto r = ece(make_pairs({-0.5, 1.0}, {0.0, 1.0}), 10);
  EXPECT_EQ(r.bins.front().count, 1u);
  EXPECT_EQ(r.bins.back().count, 1u);
  EXPECT_DOUBLE_EQ(r.bins.front().conf, -0.5);
}

TEST(Pearson, ExactLinearRelations) {
  std::vector<double> h{0.0, 0.1, 0.4, 0.7, 1.0};
  std::vector<double> up, down;
  for (double x : h) {
    up.push_back(0.5 * x + 0.2);
    down.push_back(-x + 1.0);
  }
  EXPECT_NEAR(pearson(up, h), 1.0, 1e-12);
  EXPECT_NEAR(pearson(down, h), -1.0, 1e-12);
}

TEST(Pearson, ZeroVarianceIsAnError) {
  EXPECT_THROW(pearson(std::vector<double>{0.5, 0.5}, std::vector<double>{0.1, 0.2}), NumericError);
  EXPECT_THROW(spearman(std::vector<double>{0.1, 0.2}, std::vector<double>{0.3, 0.3}), NumericError);
}

TEST(Spearman, MonotoneAndReversed) {
  std::vector<double> h{0.0, 0.2, 0.3, 0.9, 1.0};
  std::vector<double> e, rev;
  for (double x : h) {
    e.push_back(std::exp(x));
    rev.push_back(-x);
  }
  EXPECT_NEAR(spearman(e, h), 1.0, 1e-12);
  EXPECT_NEAR(spearman(rev, h), -1.0, 1e-12);
}

TEST(Spearman, TiesUseAverageRanks) {
  // ranks (3,1,2) against (1.5,1.5,3): centered covariance is zero
  const std::vector<double> x{3, 1, 2}, y{1, 1, 2};
  EXPECT_NEAR(spearman(x, y), 0.0, 1e-15);
  EXPECT_EQ(average_ranks(y), (std::vector<double>{1.5, 1.5, 3.0}));
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> small(0, 5);
  for (int t = 0; t < 500; ++t) {
    std::vector<double> a(12), b(12);
    for (auto& v : a) v = small(rng);
    for (auto& v : b) v = small(rng);
    const auto ra = oracle::ranks_brute_force(a);
    ASSERT_EQ(average_ranks(a), ra);
    const auto rb = oracle::ranks_brute_force(b);
    const bool degenerate = std::all_of(a.begin(), a.end(), [&](double v) { return v == a[0]; }) ||
                            std::all_of(b.begin(), b.end(), [&](double v) { return v == b[0]; });
    if (degenerate) continue;
    ASSERT_NEAR(spearman(a, b), oracle::pearson_plain(ra, rb), 1e-12);
  }
}

TEST(Spearman, InvariantUnderIncreasingTransforms) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> k(0.5, 5.0);
  const auto pairs = testing_support::random_pairs(rng, 100);
  const auto m = model_scores(pairs);
  const auto h = human_scores(pairs);
  const double base = spearman(m, h);
  for (int t = 0; t < 1000; ++t) {
    const double c = k(rng);
    std::vector<double> tm;
    for (double x : m) tm.push_back(t % 2 ? std::exp(c * x) : std::atan(c * x) + c * x * x * x);
    ASSERT_NEAR(spearman(tm, h), base, 1e-12);
  }
}

TEST(Pearson, AffineInvariance) {
  std::mt19937_64 rng(6);
  const auto pairs = testing_support::random_pairs(rng, 80);
  const auto m = model_scores(pairs);
  const auto h = human_scores(pairs);
  const double base = pearson(m, h);
  std::vector<double> am, ah;
  for (double x : m) am.push_back(3.5 * x - 0.25);
  for (double x : h) ah.push_back(0.01 * x + 7.0);
  EXPECT_NEAR(pearson(am, h), base, 1e-12);
  EXPECT_NEAR(pearson(m, ah), base, 1e-12);
}

TEST(Metrics, JensenAndRanges) {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 10000; ++t) {
    const auto pairs = testing_support::random_pairs(rng, 1 + t % 30, 0.5);
    ASSERT_GE(rmse(pairs) + 1e-15, std::fabs(mbe(pairs)));
    // conf averages unclamped scores, so the unit range needs scores in [0, 1]
    std::vector<ScoredPair> unit_pairs;
    for (std::size_t i = 0; i < 1 + t % 30; ++i) unit_pairs.push_back({"", u(rng), u(rng)});
    const double e = ece(unit_pairs).ece;
    ASSERT_GE(e, 0.0);
    ASSERT_LE(e, 1.0);
  }
}

TEST(Metrics, PermutationInvariance) {
  std::mt19937_64 rng(12);
  auto pairs = testing_support::random_pairs(rng, 300);
  const auto a = evaluate_all(pairs);
  std::shuffle(pairs.begin(), pairs.end(), rng);
  const auto b = evaluate_all(pairs);
  EXPECT_NEAR(a.rmse, b.rmse, 1e-12);
  EXPECT_NEAR(a.mbe, b.mbe, 1e-12);
  EXPECT_NEAR(a.ece, b.ece, 1e-12);
  EXPECT_NEAR(a.pearson, b.pearson, 1e-12);
  EXPECT_NEAR(a.spearman, b.spearman, 1e-12);
}

TEST(Metrics, DuplicationLeavesMeansUnchanged) {
  const auto base = make_pairs({0.7, 0.2}, {0.5, 0.4});
  std::vector<ScoredPair> dup;
  for (int i = 0; i < 100; ++i) dup.insert(dup.end(), base.begin(), base.end());
  EXPECT_NEAR(rmse(dup), rmse(base), 1e-15);
  EXPECT_NEAR(mbe(dup), mbe(base), 1e-15);
}

TEST(EvaluateAll, MatchesIndividualCalls) {
  std::mt19937_64 rng(14);
  const auto pairs = testing_support::random_pairs(rng, 50);
  const auto r = evaluate_all(pairs);
  EXPECT_EQ(r.n, 50u);
  EXPECT_EQ(r.n_bins, kDefaultEceBins);
  EXPECT_EQ(r.rmse, rmse(pairs));
  EXPECT_EQ(r.mbe, mbe(pairs));
  EXPECT_EQ(r.ece, ece(pairs).ece);
  EXPECT_EQ(r.pearson, pearson(pairs));
  EXPECT_EQ(r.spearman, spearman(pairs));
}
