#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "ctails/rng.hpp"

namespace ctails {

inline constexpr double kCensoredR = std::numeric_limits<double>::infinity();

// Repetitions to reach 99% cumulative ground-state probability:
// R = log(1 - 0.99) / log(1 - p).  p=0 censors to +inf, p=1 gives 0.
inline double repetitions_R(double p) {
  if (!(p >= 0.0 && p <= 1.0))
    throw std::invalid_argument("repetitions_R: p must lie in [0,1]");
  if (p == 0.0) return kCensoredR;
  if (p == 1.0) return 0.0;
  if (p == 0.99) return 1.0;
  return std::log(1.0 - 0.99) / std::log(1.0 - p);
}

// Physical repetition count: R clamped below at 1.
inline double repetitions_clamped(double p) { return std::max(1.0, repetitions_R(p)); }

// Nearest-rank order statistic; censored (+inf) values rank above all finite
// ones.  percentile in (0, 100].
inline double nearest_rank(std::vector<double> values, double percentile) {
  if (values.empty()) throw std::invalid_argument("nearest_rank: empty sample");
  if (!(percentile > 0.0 && percentile <= 100.0))
    throw std::invalid_argument("nearest_rank: percentile must lie in (0,100]");
  std::sort(values.begin(), values.end());
  std::size_t rank = static_cast<std::size_t>(
      std::ceil(percentile / 100.0 * static_cast<double>(values.size())));
  rank = std::max<std::size_t>(1, std::min(rank, values.size()));
  return values[rank - 1];
}

struct HardnessRow {
  std::string id;
  double p_hat = 0.0;
  double R = kCensoredR;
  double model_time_ns = 0.0;
  std::string solver = "sa";
  double alpha = 1.0;
  double sigma = 0.0;
  int sweeps = 0;
};

using HardnessTable = std::vector<HardnessRow>;

// Order statistics of R over the table; censored rows rank hardest.
inline std::vector<std::pair<double, double>> percentile_curves(
    const HardnessTable& table, const std::vector<double>& percentiles) {
  if (table.empty()) throw std::invalid_argument("percentile_curves: empty table");
  std::vector<double> rs;
  rs.reserve(table.size());
  for (const auto& row : table) rs.push_back(row.R);
  std::vector<std::pair<double, double>> out;
  for (double p : percentiles) out.emplace_back(p, nearest_rank(rs, p));
  return out;
}

// Percentile bootstrap over instance resampling.  The statistic may return
// +inf (censored); interval endpoints are rank-based so censoring is safe.
inline std::pair<double, double> bootstrap_ci(
    const std::vector<double>& per_instance_values,
    const std::function<double(const std::vector<double>&)>& statistic, double level,
    int resamples, std::uint64_t seed) {
  if (per_instance_values.empty()) throw std::invalid_argument("bootstrap_ci: empty sample");
  if (resamples < 1) throw std::invalid_argument("bootstrap_ci: resamples must be >= 1");
  Rng rng(seed);
  std::vector<double> stats(resamples);
  std::vector<double> resample(per_instance_values.size());
  for (int b = 0; b < resamples; ++b) {
    for (auto& x : resample)
      x = per_instance_values[bounded(rng, per_instance_values.size())];
    stats[b] = statistic(resample);
  }
  std::sort(stats.begin(), stats.end());
  const double tail = (1.0 - level) / 2.0;
  auto pick = [&](double q) {
    std::size_t r = static_cast<std::size_t>(std::ceil(q * resamples));
    r = std::max<std::size_t>(1, std::min(r, stats.size()));
    return stats[r - 1];
  };
  return {pick(tail), pick(1.0 - tail)};
}

struct QuantileSpreadRow {
  std::string id;
  double r_median = kCensoredR;
  double r25 = kCensoredR;
  double r75 = kCensoredR;
  double spread = kCensoredR;  // r75 / r25
  bool censored_median = false;
};

// Per-instance spread of R over a full experiment grid (default 10 gauges x
// 10 repetitions).  Instances with a censored median are flagged; they are
// excluded from normalized plots downstream.
inline std::vector<QuantileSpreadRow> quantile_spread(
    const std::map<std::string, std::vector<double>>& per_instance_R) {
  std::vector<QuantileSpreadRow> out;
  for (const auto& [id, rs] : per_instance_R) {
    if (rs.empty()) continue;
    QuantileSpreadRow row;
    row.id = id;
    row.r_median = nearest_rank(rs, 50.0);
    row.r25 = nearest_rank(rs, 25.0);
    row.r75 = nearest_rank(rs, 75.0);
    row.censored_median = std::isinf(row.r_median);
    if (std::isinf(row.r25))
      row.spread = kCensoredR;
    else if (std::isinf(row.r75))
      row.spread = kCensoredR;
    else
      row.spread = row.r75 / row.r25;
    out.push_back(std::move(row));
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.r_median != b.r_median) return a.r_median < b.r_median;
    return a.id < b.id;
  });
  return out;
}

// Right-continuous empirical CDF step points: (x, fraction <= x).
inline std::vector<std::pair<double, double>> ecdf(std::vector<double> values) {
  std::vector<std::pair<double, double>> out;
  if (values.empty()) return out;
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i + 1 < values.size() && values[i + 1] == values[i]) continue;
    out.emplace_back(values[i], static_cast<double>(i + 1) / n);
  }
  return out;
}

// Crossing-time convention for ECDF plots: instances with no crossing are
// shown at s = 0.10.
inline constexpr double kNoCrossingBucket = 0.10;

}  // namespace ctails
