// SPDX-License-Identifier: Apache-2.0
#include "abps/env.hpp"

#include <algorithm>
#include <cmath>

#include "abps/error.hpp"

namespace abps::env {

const char* kind_name(Kind k) {
  switch (k) {
    case Kind::kChain: return "chain";
    case Kind::kGridworld: return "gridworld";
    case Kind::kWindyGridworld: return "windy-gridworld";
  }
  fail("kind_name: bad enum value");
}

Kind kind_from_name(const std::string& name) {
  if (name == "chain") return Kind::kChain;
  if (name == "gridworld") return Kind::kGridworld;
  if (name == "windy-gridworld") return Kind::kWindyGridworld;
  fail("unknown environment kind '", name, "'");
}

Env::Env(const EnvSpec& spec) : spec_(spec) {
  require(spec.max_episode_steps >= 1, "env: max_episode_steps must be >= 1");
  require(spec.slip_probability >= 0.0 && spec.slip_probability <= 1.0,
          "env: slip_probability must be in [0, 1]");
  if (spec.kind == Kind::kChain) {
    require(spec.chain_length >= 2, "env: chain needs length >= 2");
    state_count_ = spec.chain_length;
    action_count_ = 2;
  } else {
    require(spec.width >= 1 && spec.height >= 1, "env: grid needs positive size");
    require(spec.width * spec.height >= 2, "env: grid needs at least 2 cells");
    state_count_ = spec.width * spec.height;
    action_count_ = 4;
  }
  if (spec.kind != Kind::kWindyGridworld) {
    require(spec.slip_probability == 0.0,
            "env: slip_probability must be 0 for deterministic kinds");
  }
  goal_state_ = state_count_ - 1;
}

Observation Env::observation(int state) const {
  require(state >= 0 && state < state_count_, "env: state out of range");
  Observation obs;
  obs.features.assign(static_cast<std::size_t>(state_count_), 0.0);
  obs.features[static_cast<std::size_t>(state)] = 1.0;
  obs.state_id = state;
  return obs;
}

int Env::move(int state, int direction) const {
  if (spec_.kind == Kind::kChain) {
    const int next = direction == 0 ? state - 1 : state + 1;
    return std::clamp(next, 0, state_count_ - 1);
  }
  const int w = spec_.width;
  int x = state % w, y = state / w;
  switch (direction) {
    case 0: y -= 1; break;
    case 1: y += 1; break;
    case 2: x -= 1; break;
    case 3: x += 1; break;
    default: fail("env: bad direction");
  }
  if (x < 0 || x >= w || y < 0 || y >= spec_.height) return state;  // wall
  return y * w + x;
}

std::vector<Outcome> Env::outcomes(int state, int action) const {
  require(state >= 0 && state < state_count_, "env: state out of range");
  require(action >= 0 && action < action_count_, "env: action out of range");
  require(!is_goal(state), "env: goal state has no outgoing transitions");

  auto entry = [&](int direction, double prob) {
    const int next = move(state, direction);
    const bool done = is_goal(next);
    return Outcome{prob, next, done ? 1.0 : 0.0, done};
  };

  if (spec_.kind != Kind::kWindyGridworld || spec_.slip_probability == 0.0) {
    return {entry(action, 1.0)};
  }
  const double p = spec_.slip_probability;
  std::vector<Outcome> out;
  out.push_back(entry(action, 1.0 - p));
  for (int d = 0; d < action_count_; ++d) {
    if (d != action) out.push_back(entry(d, p / 3.0));
  }
  return out;
}

Observation Env::reset(std::uint64_t episode_seed) {
  rng_ = RngStream(derive_seed(spec_.seed, episode_seed));
  state_ = 0;
  steps_ = 0;
  terminal_ = false;
  return observation(state_);
}

StepResult Env::step(int action) {
  require(!terminal_, "env: step on a terminal environment (reset first)");
  require(action >= 0 && action < action_count_, "env: action out of range");

  const auto dist = outcomes(state_, action);
  const Outcome* picked = &dist.front();
  if (dist.size() > 1) {
    const double u = rng_.uniform01();
    double cum = 0.0;
    for (const auto& o : dist) {
      cum += o.prob;
      if (u < cum) {
        picked = &o;
        break;
      }
      picked = &o;  // numerical slack: u in the final sliver lands on the last entry
    }
  }

  state_ = picked->next_state;
  steps_ += 1;
  const bool done = picked->done || steps_ >= spec_.max_episode_steps;
  terminal_ = done;
  return StepResult{observation(state_), picked->reward, done};
}

int QTable::greedy(int state) const {
  int best = 0;
  for (int a = 1; a < action_count; ++a) {
    if (at(state, a) > at(state, best)) best = a;
  }
  return best;
}

double QTable::value(int state) const { return at(state, greedy(state)); }

QTable optimal_q(const EnvSpec& spec, double discount) {
  require(discount >= 0.0 && discount < 1.0, "optimal_q: discount must be in [0, 1)");
  const Env env(spec);
  const int S = env.state_count(), A = env.action_count();
  const int goal = S - 1;

  QTable table;
  table.state_count = S;
  table.action_count = A;
  table.q.assign(static_cast<std::size_t>(S * A), 0.0);

  std::vector<double> next(table.q.size(), 0.0);
  const int max_sweeps = 1000000;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double residual = 0.0;
    for (int s = 0; s < S; ++s) {
      for (int a = 0; a < A; ++a) {
        double v = 0.0;
        if (s != goal) {
          for (const auto& o : env.outcomes(s, a)) {
            const double cont = o.done ? 0.0 : discount * table.value(o.next_state);
            v += o.prob * (o.reward + cont);
          }
        }
        const std::size_t idx = static_cast<std::size_t>(s * A + a);
        residual = std::max(residual, std::abs(v - table.q[idx]));
        next[idx] = v;
      }
    }
    table.q.swap(next);
    if (residual <= 1e-12) return table;
  }
  fail("optimal_q: value iteration did not converge");
}

}  // namespace abps::env
