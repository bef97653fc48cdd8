// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "abps/error.hpp"
#include "abps/learner.hpp"
#include "abps/net.hpp"
#include "abps/rng.hpp"

using abps::RngStream;
using abps::learner::HyperParams;
using abps::learner::Learner;
using abps::net::QNetwork;
using abps::net::WeightSnapshot;
using abps::replay::Transition;

namespace {

abps::env::Observation obs_of(std::vector<double> features) {
  abps::env::Observation o;
  o.features = std::move(features);
  return o;
}

Transition make_t(std::vector<double> s, int a, double r, std::vector<double> s_next,
                  bool done) {
  Transition t;
  t.s = obs_of(std::move(s));
  t.a = a;
  t.r = r;
  t.s_next = obs_of(std::move(s_next));
  t.done = done;
  return t;
}

std::vector<const Transition*> ptrs(const std::vector<Transition>& ts) {
  std::vector<const Transition*> out;
  for (const auto& t : ts) out.push_back(&t);
  return out;
}

HyperParams hp(std::vector<int> hidden = {8}, double lr = 1e-3) {
  HyperParams h;
  h.hidden_sizes = std::move(hidden);
  h.learning_rate = lr;
  return h;
}

}  // namespace

TEST_CASE("qnetwork: zero weights give zero q-values") {
  QNetwork net(3, {4}, 2);
  const auto q = net.forward({0.2, -0.7, 1.3});
  CHECK(q == std::vector<double>{0.0, 0.0});
}

TEST_CASE("qnetwork: single linear layer matches hand matmul") {
  QNetwork net(2, {}, 2);
  net.layers()[0].w = {1.0, 2.0, 3.0, 4.0};
  net.layers()[0].b = {0.5, -0.5};
  const auto q = net.forward({1.0, 1.0});
  CHECK(q[0] == doctest::Approx(3.5).epsilon(1e-15));
  CHECK(q[1] == doctest::Approx(6.5).epsilon(1e-15));
}

TEST_CASE("qnetwork: forward is pure and shape-checked") {
  QNetwork net(3, {5, 4}, 2);
  RngStream rng(9);
  net.init_weights(rng);
  const std::vector<double> x{0.1, 0.2, 0.3};
  CHECK(net.forward(x) == net.forward(x));
  CHECK_THROWS_AS(net.forward({0.1, 0.2}), abps::Error);
}

TEST_CASE("qnetwork: init is seeded and bounded") {
  QNetwork a(4, {6}, 3), b(4, {6}, 3);
  RngStream ra(5), rb(5), rc(6);
  a.init_weights(ra);
  b.init_weights(rb);
  CHECK(a.flat_params() == b.flat_params());
  b.init_weights(rc);
  CHECK(a.flat_params() != b.flat_params());
  for (const auto& l : a.layers()) {
    const double limit = std::sqrt(6.0 / (l.rows + l.cols));
    for (double w : l.w) {
      CHECK(w >= -limit);
      CHECK(w <= limit);
    }
    for (double bias : l.b) CHECK(bias == 0.0);
  }
}

TEST_CASE("qnetwork: flat params round-trip") {
  QNetwork a(3, {4, 5}, 2);
  RngStream rng(1);
  a.init_weights(rng);
  QNetwork b(3, {4, 5}, 2);
  b.set_flat_params(a.flat_params());
  CHECK(a.forward({1, 2, 3}) == b.forward({1, 2, 3}));
  CHECK_THROWS_AS(b.set_flat_params(std::vector<double>(3, 0.0)), abps::Error);
}

TEST_CASE("epsilon schedule endpoints and midpoint") {
  HyperParams h = hp();
  h.epsilon_start = 1.0;
  h.epsilon_final = 0.1;
  h.epsilon_decay_steps = 1000;
  Learner lr(2, 2, h, 0);
  CHECK(lr.current_epsilon() == doctest::Approx(1.0));

  RngStream rng(0);
  const auto o = obs_of({1.0, 0.0});
  double prev = lr.current_epsilon();
  for (int i = 0; i < 500; ++i) {
    lr.act(o, rng);
    const double e = lr.current_epsilon();
    CHECK(e <= prev);  // monotone non-increasing
    prev = e;
  }
  CHECK(lr.current_epsilon() == doctest::Approx(0.55).epsilon(1e-12));
  for (int i = 0; i < 1000; ++i) lr.act(o, rng);
  CHECK(lr.current_epsilon() == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("act: greedy branch, random branch, tie-break") {
  HyperParams h = hp();
  h.epsilon_start = 1.0;
  h.epsilon_final = 0.0;
  h.epsilon_decay_steps = 1;
  Learner lr(2, 4, h, 3);
  RngStream rng(7);
  const auto o = obs_of({1.0, -0.5});

  lr.act(o, rng);  // burn the one exploring step; epsilon is 0 afterwards
  CHECK(lr.current_epsilon() == 0.0);
  for (int i = 0; i < 20; ++i) CHECK(lr.act(o, rng) == lr.greedy_action(o));

  // all-zero network: tie -> lowest index
  Learner zero(2, 4, h, 0);
  WeightSnapshot snap = zero.clone_weights();
  std::fill(snap.online.begin(), snap.online.end(), 0.0);
  std::fill(snap.target.begin(), snap.target.end(), 0.0);
  zero.load_weights(snap);
  CHECK(zero.greedy_action(o) == 0);

  // forced exploration: uniform over actions
  HyperParams h1 = hp();
  h1.epsilon_start = 1.0;
  h1.epsilon_final = 0.9;
  h1.epsilon_decay_steps = std::numeric_limits<std::uint64_t>::max();
  Learner expl(2, 4, h1, 1);
  std::vector<int> counts(4, 0);
  RngStream rng2(11);
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) ++counts[expl.act(o, rng2)];
  for (int c : counts) {
    CHECK(std::abs(static_cast<double>(c) / draws - 0.25) < 0.02);
  }
}

TEST_CASE("greedy_action does not advance the act counter") {
  Learner lr(2, 3, hp(), 0);
  const auto o = obs_of({0.3, 0.4});
  CHECK(lr.act_step_count() == 0);
  lr.greedy_action(o);
  lr.forward(o);
  CHECK(lr.act_step_count() == 0);
  RngStream rng(0);
  lr.act(o, rng);
  CHECK(lr.act_step_count() == 1);
}

TEST_CASE("greedy argmax picks the max, lowest index on tie") {
  // zero weights, biases on the output layer set the q-values directly
  HyperParams h = hp({1});
  Learner lr(2, 3, h, 0);
  WeightSnapshot snap = lr.clone_weights();
  std::fill(snap.online.begin(), snap.online.end(), 0.0);
  // flat layout: W1 (1x2), b1 (1), W2 (3x1), b2 (3)
  snap.online[6] = 1.0;  // b2 = {1, 3, 2}
  snap.online[7] = 3.0;
  snap.online[8] = 2.0;
  lr.load_weights(snap);
  const auto o = obs_of({0.0, 0.0});
  CHECK(lr.forward(o) == std::vector<double>{1.0, 3.0, 2.0});
  CHECK(lr.greedy_action(o) == 1);
}

TEST_CASE("train_step: exact target gives zero loss and no movement") {
  Learner lr(2, 2, hp(), 0);
  WeightSnapshot zero = lr.clone_weights();
  std::fill(zero.online.begin(), zero.online.end(), 0.0);
  std::fill(zero.target.begin(), zero.target.end(), 0.0);
  lr.load_weights(zero);

  const std::vector<Transition> ts{make_t({1, 0}, 0, 0.0, {0, 1}, true)};
  const double loss = lr.train_step(ptrs(ts));
  CHECK(loss == 0.0);
  CHECK(lr.clone_weights().online == zero.online);
}

TEST_CASE("train_step: discount 0 reduces targets to rewards") {
  HyperParams h = hp({4});
  h.discount = 0.0;
  Learner lr(2, 2, h, 17);
  const std::vector<Transition> ts{
      make_t({1, 0}, 0, 1.0, {0, 1}, true),
      make_t({0, 1}, 1, 0.5, {1, 0}, false),
  };
  const auto q0 = lr.forward(ts[0].s);
  const auto q1 = lr.forward(ts[1].s);
  const double expect =
      ((q0[0] - 1.0) * (q0[0] - 1.0) + (q1[1] - 0.5) * (q1[1] - 0.5)) / 2.0;
  const auto [loss, grad] = lr.loss_and_gradient(ptrs(ts));
  CHECK(loss == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("backprop gradient matches the hand-derived tiny case") {
  // net: 2 inputs -> 1 hidden (relu) -> 2 outputs, all weights hand-set
  Learner lr(2, 2, hp({1}, 0.01), 0);
  WeightSnapshot snap = lr.clone_weights();
  // flat: W1={w00,w01}, b1, W2={r0,r1}, b2={c0,c1}
  snap.online = {0.5, -0.25, 0.3, 1.5, -2.0, 0.1, 0.2};
  snap.target = snap.online;
  lr.load_weights(snap);

  const std::vector<Transition> ts{make_t({1.0, 2.0}, 0, 2.0, {0, 0}, true)};
  // forward: z1 = 0.5*1 - 0.25*2 + 0.3 = 0.3 (>0), q0 = 1.5*0.3 + 0.1 = 0.55
  // diff = 0.55 - 2 = -1.45; dout = 2*diff = -2.9
  const auto [loss, g] = lr.loss_and_gradient(ptrs(ts));
  CHECK(loss == doctest::Approx(1.45 * 1.45).epsilon(1e-14));
  const double dout = -2.9;
  const double dz1 = dout * 1.5;  // relu passes, z1 > 0
  const std::vector<double> expect{
      dz1 * 1.0, dz1 * 2.0, dz1,   // W1, b1
      dout * 0.3, 0.0,             // W2 rows (action 1 untouched)
      dout, 0.0,                   // b2
  };
  REQUIRE(g.size() == expect.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(g[i] == doctest::Approx(expect[i]).epsilon(1e-13));
  }
}

TEST_CASE("gradient_check: random nets stay under 1e-4 at perturbation 1e-5") {
  RngStream seeds(21);
  for (int trial = 0; trial < 5; ++trial) {
    const std::vector<std::vector<int>> archs{{8}, {6, 5}, {4, 4, 4}};
    const auto& hidden = archs[static_cast<std::size_t>(trial % 3)];
    Learner lr(3, 2, hp(hidden), seeds.next_u64());
    RngStream rng(seeds.next_u64());
    std::vector<Transition> ts;
    for (int i = 0; i < 6; ++i) {
      ts.push_back(make_t({rng.uniform_range(-1, 1), rng.uniform_range(-1, 1),
                           rng.uniform_range(-1, 1)},
                          static_cast<int>(rng.uniform_int(2)), rng.uniform_range(-1, 1),
                          {rng.uniform_range(-1, 1), rng.uniform_range(-1, 1),
                           rng.uniform_range(-1, 1)},
                          rng.uniform01() < 0.3));
    }
    CHECK(lr.gradient_check(ptrs(ts), 1e-5) <= 1e-4);
  }
}

TEST_CASE("gradient_check: zero-loss case reports zero error") {
  Learner lr(2, 2, hp(), 0);
  WeightSnapshot zero = lr.clone_weights();
  std::fill(zero.online.begin(), zero.online.end(), 0.0);
  std::fill(zero.target.begin(), zero.target.end(), 0.0);
  lr.load_weights(zero);
  const std::vector<Transition> ts{make_t({1, 0}, 0, 0.0, {0, 1}, true)};
  CHECK(lr.gradient_check(ptrs(ts), 1e-5) == 0.0);
  CHECK_THROWS_AS(lr.gradient_check(ptrs(ts), 1e-2), abps::Error);
}

TEST_CASE("a sign-flipped gradient would be flagged with error near 1") {
  Learner lr(3, 2, hp({6}), 33);
  RngStream rng(4);
  std::vector<Transition> ts;
  for (int i = 0; i < 4; ++i) {
    ts.push_back(make_t({rng.uniform_range(-1, 1), rng.uniform_range(-1, 1), 0.5}, 0,
                        1.0, {0, 0, 0}, true));
  }
  const auto batch = ptrs(ts);
  auto [loss, g_bp] = lr.loss_and_gradient(batch);

  // finite differences computed from outside via weight snapshots
  WeightSnapshot snap = lr.clone_weights();
  const auto base = snap.online;
  auto loss_at = [&](std::size_t i, double delta) {
    auto w = base;
    w[i] += delta;
    snap.online = w;
    lr.load_weights(snap);
    const double l = lr.loss_and_gradient(batch).first;
    snap.online = base;
    lr.load_weights(snap);
    return l;
  };
  double worst_true = 0.0, best_flipped = 2.0;
  for (std::size_t i = 0; i < base.size(); ++i) {
    const double fd = (loss_at(i, 1e-5) - loss_at(i, -1e-5)) / 2e-5;
    const double denom = std::max(1e-8, std::abs(fd) + std::abs(g_bp[i]));
    worst_true = std::max(worst_true, std::abs(fd - g_bp[i]) / denom);
    if (std::abs(g_bp[i]) > 1e-3) {
      best_flipped = std::min(best_flipped, std::abs(fd + g_bp[i]) / denom);
    }
  }
  CHECK(worst_true <= 1e-4);
  CHECK(best_flipped > 0.9);
}

TEST_CASE("repeated single-batch training collapses the loss") {
  Learner lr(4, 3, hp({16}, 1e-3), 99);
  RngStream rng(5);
  std::vector<Transition> ts;
  for (int i = 0; i < 4; ++i) {
    ts.push_back(make_t({rng.uniform_range(-1, 1), rng.uniform_range(-1, 1),
                         rng.uniform_range(-1, 1), rng.uniform_range(-1, 1)},
                        static_cast<int>(rng.uniform_int(3)), rng.uniform_range(-1, 1),
                        {0, 0, 0, 0}, true));
  }
  const auto batch = ptrs(ts);
  const double initial = lr.loss_and_gradient(batch).first;
  double last = initial;
  for (int step = 0; step < 500; ++step) last = lr.train_step(batch);
  CHECK(last <= 1e-3 * initial);
}

TEST_CASE("target network changes only at sync boundaries") {
  HyperParams h = hp({4});
  h.target_sync_period = 5;
  Learner lr(2, 2, h, 7);
  RngStream rng(8);
  std::vector<Transition> ts;
  for (int i = 0; i < 4; ++i) {
    ts.push_back(make_t({rng.uniform_range(-1, 1), rng.uniform_range(-1, 1)},
                        static_cast<int>(rng.uniform_int(2)), rng.uniform_range(-1, 1),
                        {rng.uniform_range(-1, 1), rng.uniform_range(-1, 1)}, false));
  }
  const auto batch = ptrs(ts);
  const auto target0 = lr.target().flat_params();
  for (int step = 1; step <= 4; ++step) {
    lr.train_step(batch);
    CHECK(lr.target().flat_params() == target0);  // frozen between syncs
    CHECK(lr.online().flat_params() != target0);
  }
  lr.train_step(batch);  // step 5: sync
  CHECK(lr.target().flat_params() == lr.online().flat_params());
}

TEST_CASE("non-finite loss aborts with diagnostics") {
  Learner lr(2, 2, hp(), 0);
  std::vector<Transition> ts{make_t({1, 0}, 0, 1e308, {0, 1}, true)};
  CHECK_THROWS_AS(lr.train_step(ptrs(ts)), abps::Error);
  CHECK_THROWS_AS(lr.train_step({}), abps::Error);
}

TEST_CASE("clone/load round trip and mismatch rejection") {
  Learner a(3, 2, hp({5}), 1);
  const auto snap = a.clone_weights();
  Learner b(3, 2, hp({5}), 2);
  b.load_weights(snap);
  const auto o = obs_of({0.1, -0.2, 0.3});
  CHECK(a.forward(o) == b.forward(o));

  // snapshots have value semantics: training the source leaves them intact
  const auto before = snap.online;
  RngStream rng(3);
  std::vector<Transition> ts{make_t({1, 0, 0}, 0, 1.0, {0, 1, 0}, true)};
  a.train_step(ptrs(ts));
  CHECK(snap.online == before);
  CHECK(a.forward(o) != b.forward(o));

  Learner c(3, 2, hp({6}), 3);
  CHECK_THROWS_AS(c.load_weights(snap), abps::Error);
  Learner d(2, 2, hp({5}), 4);
  CHECK_THROWS_AS(d.load_weights(snap), abps::Error);
}

TEST_CASE("weight snapshots serialize round-trip") {
  Learner a(3, 2, hp({5, 4}), 12);
  const auto snap = a.clone_weights();
  const auto bytes = snap.to_bytes();
  const auto back = WeightSnapshot::from_bytes(bytes);
  CHECK(back.input_size == snap.input_size);
  CHECK(back.output_size == snap.output_size);
  CHECK(back.hidden_sizes == snap.hidden_sizes);
  CHECK(back.online == snap.online);
  CHECK(back.target == snap.target);

  auto truncated = bytes;
  truncated.pop_back();
  CHECK_THROWS_AS(WeightSnapshot::from_bytes(truncated), abps::Error);
}

TEST_CASE("replace_from adopts weights and hypers, keeps the behavior clock") {
  Learner dst(3, 2, hp({4}), 1);
  RngStream rng(2);
  const auto o = obs_of({1.0, 0.0, 0.0});
  for (int i = 0; i < 10; ++i) dst.act(o, rng);
  std::vector<Transition> ts{make_t({1, 0, 0}, 0, 1.0, {0, 1, 0}, true)};
  dst.train_step(ptrs(ts));
  CHECK(dst.act_step_count() == 10);

  Learner src(3, 2, hp({6}, 5e-4), 2);
  dst.replace_from(src.hyper(), src.clone_weights());
  CHECK(dst.hyper().hidden_sizes == std::vector<int>{6});
  CHECK(dst.hyper().learning_rate == 5e-4);
  CHECK(dst.forward(o) == src.forward(o));
  CHECK(dst.act_step_count() == 10);     // behavior clock survives
  CHECK(dst.train_step_count() == 0);    // optimizer clock restarts

  // snapshot that disagrees with the new hypers is rejected
  CHECK_THROWS_AS(dst.replace_from(hp({4}), src.clone_weights()), abps::Error);
}

TEST_CASE("hyperparameter validation") {
  CHECK_THROWS_AS(Learner(2, 2, hp({}), 0), abps::Error);
  auto h = hp();
  h.learning_rate = 0.0;
  CHECK_THROWS_AS(Learner(2, 2, h, 0), abps::Error);
  h = hp();
  h.epsilon_final = 0.5;
  h.epsilon_start = 0.4;
  CHECK_THROWS_AS(Learner(2, 2, h, 0), abps::Error);
  h = hp();
  h.discount = 1.0;
  CHECK_THROWS_AS(Learner(2, 2, h, 0), abps::Error);
  h = hp();
  h.epsilon_start = 0.0;
  CHECK_THROWS_AS(Learner(2, 2, h, 0), abps::Error);
}
