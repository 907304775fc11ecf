#include "simcal/compare.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "simcal/calibrators.hpp"
#include "simcal/error.hpp"

namespace simcal {

namespace {

double metric_value(const MetricsReport& r, Metric m) {
  switch (m) {
    case Metric::rmse: return r.rmse;
    case Metric::mbe: return r.mbe;
    case Metric::ece: return r.ece;
    case Metric::pearson: return r.pearson;
    case Metric::spearman: return r.spearman;
  }
  return 0.0;
}

constexpr Metric kMetrics[] = {Metric::rmse, Metric::mbe, Metric::ece, Metric::pearson, Metric::spearman};
constexpr const char* kMetricNames[] = {"RMSE", "MBE", "ECE", "Pearson", "Spearman"};

std::string delta_text(double delta) {
  if (!std::isfinite(delta)) return "(n/a)";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "(%+.1f%%)", delta);
  return buf;
}

}  // namespace

const ComparisonRow* ComparisonTable::find(std::string_view label) const {
  for (const auto& r : rows) {
    if (r.label == label) return &r;
  }
  return nullptr;
}

double percent_delta(double value, double baseline) {
  if (baseline == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return 100.0 * (value - baseline) / std::fabs(baseline);
}

double metric_delta(const MetricsReport& row, const MetricsReport& baseline, Metric metric) {
  const double v = metric_value(row, metric);
  const double b = metric_value(baseline, metric);
  if (metric == Metric::mbe) return percent_delta(std::fabs(v), std::fabs(b));
  return percent_delta(v, b);
}

ComparisonTable compare_methods(std::span<const ScoredPair> pairs, std::size_t n_bins) {
  if (pairs.size() < 5) throw ValidationError("compare: need at least 5 pairs");
  ComparisonTable table;
  table.n = pairs.size();
  table.n_bins = n_bins;

  ComparisonRow original;
  original.label = "Original";
  original.metrics = evaluate_all(pairs, n_bins);
  table.rows.push_back(std::move(original));

  const std::pair<const char*, Method> methods[] = {
      {"Linear", Method::linear},         {"Isotonic", Method::isotonic},     {"Sigmoid", Method::sigmoid},
      {"Beta", Method::beta},             {"Polynomial-2", Method::poly2},    {"Polynomial-3", Method::poly3},
      {"Polynomial-4", Method::poly4},
  };
  for (const auto& [label, method] : methods) {
    ComparisonRow row;
    row.label = label;
    row.method = method;
    try {
      row.model = fit(method, pairs);
      const auto calibrated = calibrate_pairs(*row.model, pairs);
      row.metrics = evaluate_all(calibrated, n_bins);
    } catch (const Error& e) {
      row.error = e.what();
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::string format_comparison_text(const ComparisonTable& table) {
  std::ostringstream os;
  char buf[512];
  std::snprintf(buf, sizeof(buf), "n=%zu bins=%zu\n", table.n, table.n_bins);
  os << buf;
  std::snprintf(buf, sizeof(buf), "%-14s %-18s %-18s %-18s %-18s %-18s %s\n", "Method", "RMSE", "MBE", "ECE",
                "Pearson r", "Spearman rho", "Flags");
  os << buf;
  const MetricsReport& base = *table.rows.front().metrics;
  for (const auto& row : table.rows) {
    std::snprintf(buf, sizeof(buf), "%-14s ", row.label.c_str());
    os << buf;
    if (!row.metrics) {
      os << "FAILED: " << row.error << '\n';
      continue;
    }
    for (Metric m : kMetrics) {
      std::snprintf(buf, sizeof(buf), "%7.4f %-10s ", metric_value(*row.metrics, m),
                    delta_text(metric_delta(*row.metrics, base, m)).c_str());
      os << buf;
    }
    if (row.model) {
      for (const auto& f : row.model->train_meta().diagnostics.flags) os << f << ' ';
    }
    os << '\n';
  }
  return os.str();
}

std::string format_comparison_csv(const ComparisonTable& table) {
  std::ostringstream os;
  os << "method";
  for (const char* name : kMetricNames) os << ',' << name << ',' << name << "_delta_pct";
  os << ",flags,error\n";
  const MetricsReport& base = *table.rows.front().metrics;
  char buf[64];
  for (const auto& row : table.rows) {
    os << row.label;
    for (Metric m : kMetrics) {
      if (row.metrics) {
        std::snprintf(buf, sizeof(buf), ",%.17g,%.6g", metric_value(*row.metrics, m),
                      metric_delta(*row.metrics, base, m));
        os << buf;
      } else {
        os << ",,";
      }
    }
    os << ',';
    if (row.model) {
      const auto& flags = row.model->train_meta().diagnostics.flags;
      for (std::size_t i = 0; i < flags.size(); ++i) os << (i ? ";" : "") << flags[i];
    }
    os << ',' << (row.error.empty() ? "" : "\"" + row.error + "\"") << '\n';
  }
  return os.str();
}

}  // namespace simcal
