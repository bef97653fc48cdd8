// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>

#include "abps/learner.hpp"

namespace abps {

/// One member of the training pool: a learner plus its stable identity.
/// arm_index ties the agent to its bandit arm and never changes, even when
/// population-based training rewrites the learner's weights and hypers.
struct AgentSlot {
  learner::Learner learner;
  int agent_id;
  std::size_t arm_index;
};

}  // namespace abps
