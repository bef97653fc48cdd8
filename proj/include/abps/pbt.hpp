// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "abps/agent.hpp"
#include "abps/bandit.hpp"
#include "abps/env.hpp"
#include "abps/rng.hpp"

namespace abps::pbt {

struct PbtConfig {
  bool enabled = false;
  /// PBT fires every pbt_period_multiplier selection periods.
  std::uint64_t pbt_period_multiplier = 4;
  double truncation_fraction = 0.25;
  /// In bandit selection rounds; 0 means "use 2 x pbt_period_multiplier".
  std::uint64_t staleness_threshold = 0;
  double perturb_down = 0.8;
  double perturb_up = 1.2;
  bool mutate_learning_rate = true;
  bool mutate_epsilon_decay = true;
  /// Explore clamps mutated values into these ranges. Defaults are the pool
  /// prior's sampling ranges; when a config supplies an explicit pool the
  /// envelope can be overridden there.
  double learning_rate_min = 1e-5;
  double learning_rate_max = 5e-3;
  std::uint64_t epsilon_decay_min = 250000;
  std::uint64_t epsilon_decay_max = 4000000;

  void validate() const;
  std::uint64_t effective_staleness_threshold() const;
};

/// PBT runs after selection periods 1·multiplier, 2·multiplier, ... and never
/// before any training happened.
bool pbt_ready(std::uint64_t selection_round, const PbtConfig& cfg);

/// Arm indices ordered by bandit mean, best first; equal means keep the lower
/// index first.
std::vector<std::size_t> rank_pool_by_mean(const bandit::Bandit& bandit);

/// If the arm's bandit value is stale, re-evaluate the agent greedily and
/// overwrite the arm. Returns the fresh mean when a refresh happened, along
/// with the evaluation's environment step cost.
struct RefreshOutcome {
  double mean_return;
  std::uint64_t eval_env_steps;
};
std::optional<RefreshOutcome> refresh_if_stale(const AgentSlot& agent,
                                               bandit::Bandit& bandit,
                                               std::uint64_t now,
                                               std::uint64_t staleness_threshold,
                                               const env::EnvSpec& spec,
                                               int eval_episodes,
                                               std::uint64_t seed_base);

/// Truncation exploit for one agent against a fixed ranking snapshot. When
/// the agent sits in the bottom fraction, copies weights, hypers, and bandit
/// statistics from a uniformly drawn member of the top fraction.
struct ExploitOutcome {
  std::size_t src_arm;
  learner::HyperParams old_hyper;
  learner::HyperParams new_hyper;
};
std::optional<ExploitOutcome> exploit(std::size_t agent_index,
                                      std::vector<AgentSlot>& pool,
                                      bandit::Bandit& bandit,
                                      const std::vector<std::size_t>& ranking,
                                      double truncation_fraction, RngStream& rng);

/// Convenience overload ranking the pool itself (single-shot use).
std::optional<ExploitOutcome> exploit(std::size_t agent_index,
                                      std::vector<AgentSlot>& pool,
                                      bandit::Bandit& bandit,
                                      double truncation_fraction, RngStream& rng);

/// Perturbs each mutable key by a factor drawn uniformly from
/// {perturb_down, perturb_up}, clamped into the prior ranges. Architecture is
/// never touched.
learner::HyperParams explore(const learner::HyperParams& hyper, const PbtConfig& cfg,
                             RngStream& rng);

}  // namespace abps::pbt
