// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>

#include "abps/config.hpp"
#include "abps/training.hpp"

namespace abps::harness {

/// Dispatches a resolved config to the matching training entry point.
training::TrainingLog execute(const config::ExperimentConfig& cfg);

/// Resolves, runs, and writes eval.csv, selections.csv, events.csv,
/// metrics.csv, and resolved.toml into out_dir. Every file is written
/// atomically after the run finishes, so a failed run leaves no partial
/// outputs. Returns the log.
training::TrainingLog run_experiment(const config::ExperimentConfig& cfg,
                                     const std::filesystem::path& out_dir);

/// True when the ABPS_LOG environment variable asks for progress output.
bool verbose();

}  // namespace abps::harness
