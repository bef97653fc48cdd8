// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "abps/env.hpp"
#include "abps/error.hpp"

using namespace abps::env;

namespace {

EnvSpec chain_spec(int n, int max_steps = 100) {
  EnvSpec s;
  s.kind = Kind::kChain;
  s.chain_length = n;
  s.max_episode_steps = max_steps;
  return s;
}

EnvSpec grid_spec(int w, int h, int max_steps = 100) {
  EnvSpec s;
  s.kind = Kind::kGridworld;
  s.width = w;
  s.height = h;
  s.max_episode_steps = max_steps;
  return s;
}

EnvSpec windy_spec(int w, int h, double slip, int max_steps = 100) {
  EnvSpec s = grid_spec(w, h, max_steps);
  s.kind = Kind::kWindyGridworld;
  s.slip_probability = slip;
  return s;
}

}  // namespace

TEST_CASE("chain dynamics") {
  Env env(chain_spec(5));
  auto obs = env.reset(0);
  CHECK(obs.state_id == 0);
  CHECK(obs.features == std::vector<double>{1, 0, 0, 0, 0});

  auto r = env.step(1);
  CHECK(r.observation.state_id == 1);
  CHECK(r.reward == 0.0);
  CHECK_FALSE(r.done);

  r = env.step(0);  // back to 0
  CHECK(r.observation.state_id == 0);
  r = env.step(0);  // left at the left edge stays
  CHECK(r.observation.state_id == 0);

  for (int s = 0; s < 3; ++s) r = env.step(1);
  CHECK(r.observation.state_id == 3);
  r = env.step(1);
  CHECK(r.observation.state_id == 4);
  CHECK(r.reward == 1.0);
  CHECK(r.done);
  CHECK_THROWS_AS(env.step(1), abps::Error);
}

TEST_CASE("gridworld movement and walls") {
  Env env(grid_spec(4, 4));
  auto obs = env.reset(7);
  CHECK(obs.state_id == 0);
  CHECK(obs.features.size() == 16);
  CHECK(obs.features[0] == 1.0);

  CHECK(env.step(0).observation.state_id == 0);  // up against the wall
  CHECK(env.step(2).observation.state_id == 0);  // left against the wall
  CHECK(env.step(3).observation.state_id == 1);  // right
  CHECK(env.step(1).observation.state_id == 5);  // down

  // walk to the goal: right twice then down twice
  env.step(3);
  env.step(3);
  env.step(1);
  auto r = env.step(1);
  CHECK(r.observation.state_id == 15);
  CHECK(r.reward == 1.0);
  CHECK(r.done);
}

TEST_CASE("episode truncates at max_episode_steps") {
  Env env(chain_spec(5, 3));
  env.reset(0);
  env.step(0);
  env.step(0);
  auto r = env.step(0);
  CHECK(r.done);
  CHECK(r.reward == 0.0);
  CHECK(env.steps_taken() == 3);
}

TEST_CASE("same episode seed replays identically") {
  Env a(windy_spec(4, 4, 0.3));
  Env b(windy_spec(4, 4, 0.3));
  const std::vector<int> actions{3, 3, 1, 0, 2, 1, 3, 1, 1, 3, 0, 2, 3, 1};
  for (std::uint64_t seed : {0ULL, 5ULL, 123456ULL}) {
    a.reset(seed);
    b.reset(seed);
    for (int act : actions) {
      if (a.terminal()) break;
      auto ra = a.step(act);
      auto rb = b.step(act);
      CHECK(ra.observation.state_id == rb.observation.state_id);
      CHECK(ra.reward == rb.reward);
      CHECK(ra.done == rb.done);
    }
  }
}

TEST_CASE("distinct episode seeds change windy trajectories") {
  Env env(windy_spec(6, 6, 0.4, 1000));
  auto run = [&](std::uint64_t seed) {
    env.reset(seed);
    std::vector<int> states;
    for (int i = 0; i < 30 && !env.terminal(); ++i) states.push_back(env.step(3).observation.state_id);
    return states;
  };
  CHECK(run(1) != run(2));
}

TEST_CASE("windy slip frequency matches slip_probability") {
  const double slip = 0.1;
  Env env(windy_spec(5, 5, slip, 1000000));
  env.reset(42);
  // from the start corner, command "down"; a slip to up or left keeps us in
  // place, a slip to right moves right.
  int slipped = 0;
  const int trials = 10000;
  for (int i = 0; i < trials; ++i) {
    // re-enter state 0 deterministically by resetting; use distinct seeds
    env.reset(static_cast<std::uint64_t>(i));
    const int next = env.step(1).observation.state_id;
    if (next != 5) ++slipped;
  }
  const double freq = static_cast<double>(slipped) / trials;
  CHECK(freq == doctest::Approx(slip).epsilon(0.2));
  CHECK(std::abs(freq - slip) < 0.02);
}

TEST_CASE("outcomes distribution is exact for windy grids") {
  Env env(windy_spec(4, 4, 0.3, 100));
  const auto dist = env.outcomes(5, 3);  // interior cell, command right
  REQUIRE(dist.size() == 4);
  CHECK(dist[0].prob == doctest::Approx(0.7));
  CHECK(dist[0].next_state == 6);
  double total = 0.0;
  for (const auto& o : dist) total += o.prob;
  CHECK(total == doctest::Approx(1.0));

  // deterministic kinds have a single certain outcome
  Env det(grid_spec(4, 4));
  const auto d2 = det.outcomes(5, 3);
  REQUIRE(d2.size() == 1);
  CHECK(d2[0].prob == 1.0);
  CHECK(d2[0].next_state == 6);
}

TEST_CASE("spec validation") {
  CHECK_THROWS_AS(Env{chain_spec(1)}, abps::Error);
  auto bad = grid_spec(4, 4);
  bad.slip_probability = 0.1;  // deterministic kind must have slip 0
  CHECK_THROWS_AS(Env{bad}, abps::Error);
  auto bad2 = windy_spec(4, 4, 1.5);
  CHECK_THROWS_AS(Env{bad2}, abps::Error);
  auto bad3 = chain_spec(5, 0);
  CHECK_THROWS_AS(Env{bad3}, abps::Error);
  Env ok(chain_spec(5));
  CHECK_THROWS_AS(ok.step(1), abps::Error);  // step before reset
  ok.reset(0);
  CHECK_THROWS_AS(ok.step(2), abps::Error);  // action out of range
}

TEST_CASE("value iteration: chain Q* follows the discount power pattern") {
  const double g = 0.9;
  const auto q = optimal_q(chain_spec(5), g);
  REQUIRE(q.state_count == 5);
  REQUIRE(q.action_count == 2);
  for (int s = 0; s < 4; ++s) {
    CHECK(q.at(s, 1) == doctest::Approx(std::pow(g, 3 - s)).epsilon(1e-10));
    const double left_target = s == 0 ? g * std::pow(g, 3) : g * std::pow(g, 3 - (s - 1));
    CHECK(q.at(s, 0) == doctest::Approx(left_target).epsilon(1e-10));
    CHECK(q.greedy(s) == 1);
  }
  CHECK(q.at(4, 0) == 0.0);
  CHECK(q.at(4, 1) == 0.0);
}

TEST_CASE("value iteration satisfies the Bellman fixed point") {
  for (const auto& spec : {chain_spec(7), grid_spec(4, 4), windy_spec(4, 4, 0.25)}) {
    const double g = 0.97;
    const Env env(spec);
    const auto q = optimal_q(spec, g);
    double residual = 0.0;
    for (int s = 0; s < q.state_count; ++s) {
      for (int a = 0; a < q.action_count; ++a) {
        double v = 0.0;
        if (s != q.state_count - 1) {
          for (const auto& o : env.outcomes(s, a)) {
            v += o.prob * (o.reward + (o.done ? 0.0 : g * q.value(o.next_state)));
          }
        }
        residual = std::max(residual, std::abs(v - q.at(s, a)));
      }
    }
    CHECK(residual <= 1e-10);
  }
}

TEST_CASE("value iteration: discount 0 collapses to expected immediate reward") {
  const auto q = optimal_q(windy_spec(3, 3, 0.3), 0.0);
  const Env env(windy_spec(3, 3, 0.3));
  for (int s = 0; s < q.state_count - 1; ++s) {
    for (int a = 0; a < q.action_count; ++a) {
      double er = 0.0;
      for (const auto& o : env.outcomes(s, a)) er += o.prob * o.reward;
      CHECK(q.at(s, a) == doctest::Approx(er).epsilon(1e-12));
    }
  }
}

TEST_CASE("gridworld greedy policy reaches the goal in Manhattan distance") {
  const auto spec = grid_spec(4, 4, 100);
  const auto q = optimal_q(spec, 0.99);
  Env env(spec);
  env.reset(0);
  int steps = 0;
  while (!env.terminal()) {
    env.step(q.greedy(env.current_state()));
    ++steps;
  }
  CHECK(steps == 6);  // (4-1) + (4-1)
  CHECK(env.current_state() == 15);
}

TEST_CASE("value iteration regression fixture: chain(2), discount 0.9") {
  const auto q = optimal_q(chain_spec(2), 0.9);
  CHECK(q.at(0, 1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(q.at(0, 0) == doctest::Approx(0.9).epsilon(1e-12));
}

TEST_CASE("kind names round-trip") {
  for (Kind k : {Kind::kChain, Kind::kGridworld, Kind::kWindyGridworld}) {
    CHECK(kind_from_name(kind_name(k)) == k);
  }
  CHECK_THROWS_AS(kind_from_name("atari"), abps::Error);
}
