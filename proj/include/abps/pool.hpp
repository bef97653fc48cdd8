// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "abps/learner.hpp"
#include "abps/rng.hpp"

namespace abps::pool {

struct ArchChoice {
  std::string name;
  std::vector<int> hidden_sizes;
  double probability = 0.0;
};

/// Sampling prior for agent pools: a categorical over architectures whose
/// hidden sizes get a small multiplicative jitter, plus log-uniform ranges
/// for the learning rate and the epsilon decay horizon.
struct PoolPrior {
  std::vector<ArchChoice> architectures;
  double size_perturbation_min = 0.9;
  double size_perturbation_max = 1.1;
  double learning_rate_min = 1e-5;
  double learning_rate_max = 5e-3;
  std::uint64_t epsilon_decay_min = 250000;
  std::uint64_t epsilon_decay_max = 4000000;
  std::size_t k = 16;

  void validate() const;
};

/// The four reference architectures with marginal [0.2, 0.2, 0.2, 0.4].
PoolPrior default_prior();

/// K independent draws. Per agent, in order: architecture category, one size
/// factor per hidden layer, learning rate, epsilon decay.
std::vector<learner::HyperParams> sample_pool(const PoolPrior& prior, RngStream& rng);

/// Structural label for reporting: 3+ hidden layers are "deep"; single layers
/// are "small" (< 32), "normal" (< 128) or "wide"; anything else "custom".
std::string architecture_label(const std::vector<int>& hidden_sizes);

/// Decade bucket for positive values, e.g. 3e-4 -> "1e-4..1e-3".
std::string decade_label(double value);

}  // namespace abps::pool
