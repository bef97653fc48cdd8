// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "abps/bandit.hpp"
#include "abps/learner.hpp"
#include "abps/net.hpp"

namespace abps::checkpoint {

/// Run-state snapshot: pool weights and hyper-parameters, bandit statistics,
/// buffer metadata, and the RNG cursors. Byte layout is little-endian and
/// host-independent.
struct Checkpoint {
  std::uint64_t run_seed = 0;
  std::uint64_t env_steps = 0;
  std::uint64_t episode_counter = 0;
  std::uint64_t period_round = 0;

  std::vector<learner::HyperParams> hypers;
  std::vector<net::WeightSnapshot> weights;
  std::vector<std::uint64_t> act_step_counts;
  std::vector<std::uint64_t> train_step_counts;

  std::vector<bandit::ArmState> arms;
  std::uint64_t bandit_time = 0;
  bandit::Mode bandit_mode = bandit::Mode::kCumulative;
  std::uint64_t window_length = 25;

  std::uint64_t buffer_capacity = 0;
  std::uint64_t buffer_insert_count = 0;

  std::vector<std::string> behavior_rng;
  std::vector<std::string> batch_rng;
  std::string bandit_rng;
  std::string pbt_rng;

  std::vector<std::uint8_t> to_bytes() const;
  static Checkpoint from_bytes(const std::vector<std::uint8_t>& buf);
};

void save_checkpoint(const Checkpoint& c, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace abps::checkpoint
