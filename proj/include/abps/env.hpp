// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "abps/rng.hpp"

namespace abps::env {

enum class Kind { kChain, kGridworld, kWindyGridworld };

const char* kind_name(Kind k);
Kind kind_from_name(const std::string& name);

struct EnvSpec {
  Kind kind = Kind::kChain;
  int chain_length = 5;       // chain
  int width = 4, height = 4;  // gridworld variants
  double slip_probability = 0.0;
  int max_episode_steps = 100;
  std::uint64_t seed = 0;
};

struct Observation {
  std::vector<double> features;  // one-hot over states
  int state_id = 0;
};

struct StepResult {
  Observation observation;
  double reward = 0.0;
  bool done = false;
};

/// One entry of the transition distribution for a (state, action) pair.
/// step() samples from these; the value-iteration oracle sums over them, so
/// the two views of the dynamics can never drift apart.
struct Outcome {
  double prob;
  int next_state;
  double reward;
  bool done;  // goal reached (time-outs are not part of the dynamics)
};

/// Episodic tabular environment. All kinds start at state 0 and pay +1 for
/// the transition into the goal state; everything else pays 0.
///
/// chain(N):  states 0..N-1 on a line, actions {0:left, 1:right}, goal N-1.
/// gridworld: width x height cells, state = y*width + x, start (0,0), goal
///            (width-1, height-1), actions {0:up, 1:down, 2:left, 3:right},
///            moving off-grid keeps the agent in place.
/// windy-gridworld: gridworld where with slip_probability the commanded move
///            is replaced by one of the other three directions uniformly.
class Env {
 public:
  explicit Env(const EnvSpec& spec);

  const EnvSpec& spec() const { return spec_; }
  int state_count() const { return state_count_; }
  int action_count() const { return action_count_; }
  int feature_size() const { return state_count_; }

  Observation observation(int state) const;
  std::vector<Outcome> outcomes(int state, int action) const;

  Observation reset(std::uint64_t episode_seed);
  StepResult step(int action);

  int current_state() const { return state_; }
  int steps_taken() const { return steps_; }
  bool terminal() const { return terminal_; }

 private:
  bool is_goal(int state) const { return state == goal_state_; }
  int move(int state, int direction) const;

  EnvSpec spec_;
  int state_count_;
  int action_count_;
  int goal_state_;
  int state_ = 0;
  int steps_ = 0;
  bool terminal_ = true;  // must reset() before step()
  RngStream rng_;
};

/// Q*(s, a) for the infinite-horizon discounted problem with the goal
/// absorbing, solved by value iteration to sup-norm residual <= 1e-12.
struct QTable {
  int state_count = 0;
  int action_count = 0;
  std::vector<double> q;  // state-major

  double at(int state, int action) const { return q[static_cast<std::size_t>(state * action_count + action)]; }
  int greedy(int state) const;
  double value(int state) const;
};

QTable optimal_q(const EnvSpec& spec, double discount);

}  // namespace abps::env
