#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "microrisk/errors.hpp"
#include "microrisk/model.hpp"
#include "microrisk/risk.hpp"

namespace microrisk {

struct HistogramBin {
  double lower = 0.0;  // exclusive, except the zero bin
  double upper = 0.0;  // inclusive
  std::uint64_t count = 0;
};

struct HighRiskEntry {
  std::size_t record_index = 0;
  double risk = 0.0;
};

struct RiskSummary {
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
  double median = 0.0;  // lower-middle element for even N
};

struct BinSpec {
  // Lowest decade edge; positive risks at or below 10^floor_exponent fall
  // into one underflow bin (0, 10^floor_exponent].
  int floor_exponent = -12;
};

struct RiskReport {
  std::size_t n_records = 0;
  std::size_t retained_set_count = 0;
  double epsilon = 0.0;
  double alpha = 0.0;
  double high_risk_threshold = 0.0;
  std::vector<HistogramBin> histogram;
  std::vector<HighRiskEntry> high_risk;  // risk > threshold, descending
  RiskSummary summary;

  double high_risk_percent() const {
    return 100.0 * static_cast<double>(high_risk.size()) /
           static_cast<double>(n_records);
  }
};

// Aggregate per-record risks into decade-binned histogram, high-risk
// listing, and summary statistics. Pure function of its inputs; reruns are
// byte-identical.
inline RiskReport build_report(std::span<const RecordRisk> risks,
                               const RiskConfig& config,
                               std::size_t retained_set_count,
                               const BinSpec& bins = {}) {
  if (risks.empty()) throw DataError("cannot report on an empty risk list");

  RiskReport report;
  report.n_records = risks.size();
  report.retained_set_count = retained_set_count;
  report.epsilon = config.epsilon;
  report.alpha = config.alpha;
  report.high_risk_threshold = config.high_risk_threshold;

  std::vector<double> values;
  values.reserve(risks.size());
  for (const auto& r : risks) values.push_back(r.risk);

  double max_risk = values[0];
  double min_risk = values[0];
  double sum = 0.0;
  for (double v : values) {
    max_risk = std::max(max_risk, v);
    min_risk = std::min(min_risk, v);
    sum += v;
  }
  if (!std::isfinite(max_risk))
    throw DataError("risk values exceed the double range; lower alpha");

  std::vector<double> sorted(values);
  std::sort(sorted.begin(), sorted.end());
  report.summary = {min_risk, max_risk,
                    sum / static_cast<double>(values.size()),
                    sorted[(sorted.size() - 1) / 2]};

  // Zero bin first, then (0, 10^floor], then one bin per decade up to the
  // ceiling decade of the largest risk.
  report.histogram.push_back({0.0, 0.0, 0});
  std::vector<double> edges;  // upper edges of the positive bins
  if (max_risk > 0.0) {
    double floor_edge = std::pow(10.0, bins.floor_exponent);
    edges.push_back(floor_edge);
    int exp = bins.floor_exponent;
    while (edges.back() < max_risk && exp < 308)
      edges.push_back(std::pow(10.0, ++exp));
    if (edges.back() < max_risk) edges.push_back(max_risk);
    double prev = 0.0;
    for (double e : edges) {
      report.histogram.push_back({prev, e, 0});
      prev = e;
    }
  }
  for (double v : values) {
    if (v == 0.0) {
      ++report.histogram[0].count;
      continue;
    }
    auto it = std::lower_bound(edges.begin(), edges.end(), v);
    ++report.histogram[1 + static_cast<std::size_t>(it - edges.begin())].count;
  }

  for (std::size_t i = 0; i < values.size(); ++i)
    if (values[i] > config.high_risk_threshold)
      report.high_risk.push_back({i, values[i]});
  std::sort(report.high_risk.begin(), report.high_risk.end(),
            [](const HighRiskEntry& a, const HighRiskEntry& b) {
              if (a.risk != b.risk) return a.risk > b.risk;
              return a.record_index < b.record_index;
            });
  return report;
}

}  // namespace microrisk
