// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "abps/pool.hpp"
#include "abps/training.hpp"

namespace abps::config {

enum class Mode { kAbps, kAbpsPbt, kIndependentBaseline };

const char* mode_name(Mode m);
Mode mode_from_name(const std::string& name);

/// One experiment: environment, ABPS and PBT settings, and either an explicit
/// agent list or a sampling prior (exactly one of the two).
struct ExperimentConfig {
  training::RunConfig run;
  std::optional<pool::PoolPrior> prior;
  Mode mode = Mode::kAbps;

  void validate() const;
};

/// Parses the flat TOML subset documented in the README: [section] headers,
/// [[agent]] blocks, `key = value` lines, full-line # comments. Unknown
/// sections or keys are errors.
ExperimentConfig parse_experiment(const std::string& text);
ExperimentConfig load_experiment(const std::filesystem::path& path);

/// Samples the pool when a prior is present (seeded from run_seed), leaving
/// an explicit-agent config behind. Idempotent for explicit configs.
ExperimentConfig resolve(const ExperimentConfig& cfg);

/// Resolved-config snapshot. Always explicit agents; parsing it back and
/// resolving again reproduces the identical config.
std::string to_toml(const ExperimentConfig& cfg);

}  // namespace abps::config
