// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "abps/rng.hpp"

namespace abps::bandit {

enum class Mode { kCumulative, kSliding };

enum class StrategyKind { kRandom, kUcb, kEpsilonGreedy, kSoftmax };

struct Strategy {
  StrategyKind kind = StrategyKind::kUcb;
  double xi = 2.0;           // ucb exploration constant
  double epsilon_b = 0.1;    // epsilon_greedy only
  double temperature = 1.0;  // softmax only; 1 matches the plain formula
  // Sliding mode only: UCB visit counts n_i from the window (true) or from
  // lifetime update counts (false). t is the global selection count either way.
  bool ucb_window_counts = true;

  void validate() const;
};

const char* strategy_name(StrategyKind k);
StrategyKind strategy_from_name(const std::string& name);

struct WindowEntry {
  std::uint64_t time;
  double reward;
};

struct ArmState {
  double mean = 0.0;
  std::uint64_t pulls = 0;
  std::uint64_t total_updates = 0;
  std::uint64_t last_update_time = 0;
  std::vector<WindowEntry> window;  // sliding mode only
};

/// K-armed bandit over the agent pool. Selection time t counts every
/// selection ever made, including the K virtual ones that seed the arms.
///
/// Sliding mode keeps, per arm, the rewards observed during the trailing
/// window_length selections; mean and pulls are recomputed from that window.
/// Windows are pruned both when an arm is updated and lazily at select time,
/// so statistics always describe the trailing window even for arms the
/// strategy has been ignoring.
class Bandit {
 public:
  /// Seeds arm i with initial_rewards[i] as if it had been selected once at
  /// time i+1. Afterwards time = K and every arm has mean = its reward,
  /// pulls = 1.
  Bandit(const std::vector<double>& initial_rewards, Mode mode,
         std::uint64_t window_length = 25);

  /// Rebuild from explicit state (checkpoints, tests).
  Bandit(std::vector<ArmState> arms, std::uint64_t time, Mode mode,
         std::uint64_t window_length);

  std::size_t arm_count() const { return arms_.size(); }
  std::uint64_t time() const { return time_; }
  Mode mode() const { return mode_; }
  std::uint64_t window_length() const { return window_length_; }
  const ArmState& arm(std::size_t i) const;
  const std::vector<ArmState>& arms() const { return arms_; }

  /// Picks an arm per the strategy and advances time. UCB treats an arm with
  /// zero visits as must-explore (lowest such index first).
  std::size_t select(const Strategy& strategy, RngStream& rng);

  /// Records a mean period reward for an arm at selection time `now`.
  void update(std::size_t arm, double reward, std::uint64_t now);

  void substitute_arm(std::size_t dst, std::size_t src);

  bool is_stale(std::size_t arm, std::uint64_t now,
                std::uint64_t staleness_threshold) const;

  /// Selection distribution the softmax strategy draws from (max-shifted).
  std::vector<double> softmax_probabilities(const Strategy& strategy) const;

 private:
  std::uint64_t visit_count(std::size_t i, const Strategy& strategy) const;
  void prune_window(ArmState& a, std::uint64_t now) const;
  std::size_t argmax_mean() const;

  std::vector<ArmState> arms_;
  std::uint64_t time_ = 0;
  Mode mode_;
  std::uint64_t window_length_;
};

}  // namespace abps::bandit
