#include "simcal/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "simcal/error.hpp"

namespace simcal {

namespace {

void require_nonempty(std::span<const ScoredPair> pairs, const char* what) {
  if (pairs.empty()) throw ValidationError(std::string(what) + ": empty input");
}

long double mean_of(std::span<const double> v) {
  long double s = 0.0L;
  for (double x : v) s += x;
  return s / static_cast<long double>(v.size());
}

}  // namespace

std::vector<double> model_scores(std::span<const ScoredPair> pairs) {
  std::vector<double> out(pairs.size());
  std::transform(pairs.begin(), pairs.end(), out.begin(), [](const ScoredPair& p) { return p.model_score; });
  return out;
}

std::vector<double> human_scores(std::span<const ScoredPair> pairs) {
  std::vector<double> out(pairs.size());
  std::transform(pairs.begin(), pairs.end(), out.begin(), [](const ScoredPair& p) { return p.human_score; });
  return out;
}

double rmse(std::span<const ScoredPair> pairs) {
  require_nonempty(pairs, "rmse");
  long double ss = 0.0L;
  for (const auto& p : pairs) {
    const long double d = static_cast<long double>(p.model_score) - p.human_score;
    ss += d * d;
  }
  return static_cast<double>(std::sqrt(ss / static_cast<long double>(pairs.size())));
}

double mbe(std::span<const ScoredPair> pairs) {
  require_nonempty(pairs, "mbe");
  long double s = 0.0L;
  for (const auto& p : pairs) s += static_cast<long double>(p.model_score) - p.human_score;
  return static_cast<double>(s / static_cast<long double>(pairs.size()));
}

EceResult ece(std::span<const ScoredPair> pairs, std::size_t n_bins) {
  require_nonempty(pairs, "ece");
  if (n_bins < 1) throw ValidationError("ece: n_bins must be >= 1");

  std::vector<std::size_t> counts(n_bins, 0);
  std::vector<long double> sum_h(n_bins, 0.0L);
  std::vector<long double> sum_m(n_bins, 0.0L);
  for (const auto& p : pairs) {
    const double x = std::clamp(p.model_score, 0.0, 1.0);
    auto b = static_cast<std::size_t>(x * static_cast<double>(n_bins));
    if (b >= n_bins) b = n_bins - 1;
    ++counts[b];
    sum_h[b] += p.human_score;
    sum_m[b] += p.model_score;
  }

  EceResult out;
  out.bins.resize(n_bins);
  for (std::size_t b = 0; b < n_bins; ++b) {
    auto& bin = out.bins[b];
    bin.lower = static_cast<double>(b) / static_cast<double>(n_bins);
    bin.upper = static_cast<double>(b + 1) / static_cast<double>(n_bins);
    bin.count = counts[b];
    if (counts[b] > 0) {
      bin.acc = static_cast<double>(sum_h[b] / static_cast<long double>(counts[b]));
      bin.conf = static_cast<double>(sum_m[b] / static_cast<long double>(counts[b]));
    }
  }
  out.ece = ece_from_bins(out.bins);
  return out;
}

double ece_from_bins(std::span<const CalibrationBin> bins) {
  std::size_t n = 0;
  for (const auto& b : bins) n += b.count;
  if (n == 0) return 0.0;
  long double total = 0.0L;
  for (const auto& b : bins) {
    if (b.count == 0) continue;
    total += static_cast<long double>(b.count) * std::fabs(static_cast<long double>(b.acc) - b.conf);
  }
  return static_cast<double>(total / static_cast<long double>(n));
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ValidationError("pearson: length mismatch");
  if (x.size() < 2) throw ValidationError("pearson: need at least 2 pairs");
  const long double mx = mean_of(x);
  const long double my = mean_of(y);
  long double sxy = 0.0L;
  long double sxx = 0.0L;
  long double syy = 0.0L;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const long double dx = x[k] - mx;
    const long double dy = y[k] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0L || syy == 0.0L) throw NumericError("undefined correlation");
  const long double r = sxy / (std::sqrt(sxx) * std::sqrt(syy));
  return std::clamp(static_cast<double>(r), -1.0, 1.0);
}

std::vector<double> average_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    while (j < n && values[order[j]] == values[order[i]]) ++j;
    // positions i..j-1 share the mean of 1-based ranks i+1..j
    const double r = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = r;
    i = j;
  }
  return ranks;
}

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ValidationError("spearman: length mismatch");
  if (x.size() < 2) throw ValidationError("spearman: need at least 2 pairs");
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  return pearson(rx, ry);
}

double pearson(std::span<const ScoredPair> pairs) {
  const auto m = model_scores(pairs);
  const auto h = human_scores(pairs);
  return pearson(m, h);
}

double spearman(std::span<const ScoredPair> pairs) {
  const auto m = model_scores(pairs);
  const auto h = human_scores(pairs);
  return spearman(m, h);
}

MetricsReport evaluate_all(std::span<const ScoredPair> pairs, std::size_t n_bins) {
  require_nonempty(pairs, "evaluate");
  MetricsReport r;
  r.n = pairs.size();
  r.n_bins = n_bins;
  r.rmse = rmse(pairs);
  r.mbe = mbe(pairs);
  auto e = ece(pairs, n_bins);
  r.ece = e.ece;
  r.bins = std::move(e.bins);
  const auto m = model_scores(pairs);
  const auto h = human_scores(pairs);
  r.pearson = pearson(m, h);
  r.spearman = spearman(m, h);
  return r;
}

std::string format_report(const MetricsReport& r) {
  char line[256];
  std::ostringstream os;
  std::snprintf(line, sizeof(line), "n=%zu bins=%zu\n", r.n, r.n_bins);
  os << line;
  std::snprintf(line, sizeof(line), "RMSE=%.4f  MBE=%.4f  ECE=%.4f  r=%.4f  rho=%.4f\n", r.rmse, r.mbe, r.ece,
                r.pearson, r.spearman);
  os << line;
  os << "  bin            count     acc      conf\n";
  for (const auto& b : r.bins) {
    std::snprintf(line, sizeof(line), "  [%.2f, %.2f]  %7zu  %.4f  %.4f\n", b.lower, b.upper, b.count, b.acc,
                  b.conf);
    os << line;
  }
  return os.str();
}

std::string report_to_json(const MetricsReport& r) {
  nlohmann::json bins = nlohmann::json::array();
  for (const auto& b : r.bins) {
    bins.push_back({{"lower", b.lower}, {"upper", b.upper}, {"count", b.count}, {"acc", b.acc}, {"conf", b.conf}});
  }
  nlohmann::json j = {{"n", r.n},         {"n_bins", r.n_bins},   {"rmse", r.rmse},
                      {"mbe", r.mbe},     {"ece", r.ece},         {"pearson", r.pearson},
                      {"spearman", r.spearman}, {"bins", std::move(bins)}};
  return j.dump(2);
}

}  // namespace simcal
