// SPDX-License-Identifier: Apache-2.0
#include "abps/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "abps/error.hpp"

namespace abps::metrics {

double percentile(std::vector<double> values, double pct) {
  require(!values.empty(), "percentile: empty input");
  require(pct >= 0.0 && pct <= 100.0, "percentile: pct must be in [0, 100]");
  std::sort(values.begin(), values.end());
  if (values.size() == 1) return values[0];
  const double rank = pct / 100.0 * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(rank);
  if (lo + 1 == values.size()) return values.back();
  const double frac = rank - static_cast<double>(lo);
  return values[lo] + frac * (values[lo + 1] - values[lo]);
}

std::vector<EpochMetrics> compute_metrics(const std::vector<training::EvalRow>& rows) {
  require(!rows.empty(), "compute_metrics: no evaluation rows");
  std::map<std::uint64_t, std::pair<std::uint64_t, std::vector<double>>> by_epoch;
  for (const auto& r : rows) {
    auto& slot = by_epoch[r.epoch];
    slot.first = r.env_steps;
    slot.second.push_back(r.mean_return);
  }
  std::vector<EpochMetrics> out;
  out.reserve(by_epoch.size());
  for (auto& [epoch, slot] : by_epoch) {
    // Canonical order keeps every statistic independent of row order.
    auto& vals = slot.second;
    std::sort(vals.begin(), vals.end());
    EpochMetrics m;
    m.epoch = epoch;
    m.env_steps = slot.first;
    m.best = vals.back();
    m.top25_quantile = percentile(vals, 75.0);
    m.median = percentile(vals, 50.0);
    if (vals.front() == vals.back()) {
      m.variance = 0.0;
    } else {
      double mean = 0.0;
      for (double v : vals) mean += v;
      mean /= static_cast<double>(vals.size());
      double var = 0.0;
      for (double v : vals) var += (v - mean) * (v - mean);
      m.variance = var / static_cast<double>(vals.size());
    }
    out.push_back(m);
  }
  return out;
}

std::vector<std::vector<std::uint64_t>> selection_frequencies(
    const std::vector<training::SelectionEvent>& selections, std::size_t arm_count,
    const std::vector<std::uint64_t>& round_boundaries) {
  require(arm_count >= 1, "selection_frequencies: arm_count must be >= 1");
  for (std::size_t b = 1; b < round_boundaries.size(); ++b)
    require(round_boundaries[b - 1] < round_boundaries[b],
            "selection_frequencies: boundaries must ascend");
  std::vector<std::vector<std::uint64_t>> out(round_boundaries.size(),
                                              std::vector<std::uint64_t>(arm_count, 0));
  for (const auto& sel : selections) {
    require(sel.arm < arm_count, "selection_frequencies: arm index out of range");
    for (std::size_t b = 0; b < round_boundaries.size(); ++b) {
      if (sel.round <= round_boundaries[b]) ++out[b][sel.arm];
    }
  }
  return out;
}

std::map<std::string, std::uint64_t> bucket_counts(const std::vector<std::uint64_t>& arm_counts,
                                                   const std::vector<std::string>& arm_labels) {
  require(arm_counts.size() == arm_labels.size(), "bucket_counts: size mismatch");
  std::map<std::string, std::uint64_t> out;
  for (std::size_t i = 0; i < arm_counts.size(); ++i) out[arm_labels[i]] += arm_counts[i];
  return out;
}

}  // namespace abps::metrics
