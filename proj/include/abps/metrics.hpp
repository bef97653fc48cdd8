// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "abps/learner.hpp"
#include "abps/training.hpp"

namespace abps::metrics {

struct EpochMetrics {
  std::uint64_t epoch = 0;
  std::uint64_t env_steps = 0;
  double best = 0.0;
  double top25_quantile = 0.0;  // 75th percentile of agent means
  double variance = 0.0;        // population variance over agents
  double median = 0.0;
};

/// Percentile in [0, 100] with linear interpolation between closest ranks.
double percentile(std::vector<double> values, double pct);

/// Per-epoch pool statistics from evaluation rows, epochs ascending. Agent
/// order within an epoch is irrelevant.
std::vector<EpochMetrics> compute_metrics(const std::vector<training::EvalRow>& rows);

/// Cumulative selection counts per arm at each boundary. Boundary b covers
/// every event with round <= round_boundaries[b]; boundaries must ascend.
std::vector<std::vector<std::uint64_t>> selection_frequencies(
    const std::vector<training::SelectionEvent>& selections, std::size_t arm_count,
    const std::vector<std::uint64_t>& round_boundaries);

/// Folds per-arm counts by an attribute label per arm (architecture,
/// learning-rate decade, ...). Counts for arms sharing a label add up.
std::map<std::string, std::uint64_t> bucket_counts(const std::vector<std::uint64_t>& arm_counts,
                                                   const std::vector<std::string>& arm_labels);

}  // namespace abps::metrics
