// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "abps/env.hpp"
#include "abps/net.hpp"
#include "abps/replay.hpp"
#include "abps/rng.hpp"

namespace abps::learner {

struct HyperParams {
  std::vector<int> hidden_sizes{64};
  double learning_rate = 1e-3;
  std::uint64_t epsilon_decay_steps = 10000;
  double epsilon_start = 1.0;
  double epsilon_final = 0.1;
  double discount = 0.99;
  std::uint64_t target_sync_period = 500;

  void validate() const;
};

/// One DQN-style learner: online + target Q-network, Adam, annealing
/// epsilon-greedy behavior. Training draws batches from the shared replay
/// buffer; the learner itself never touches an environment.
class Learner {
 public:
  Learner(int input_size, int action_count, HyperParams hyper, std::uint64_t init_seed);

  const HyperParams& hyper() const { return hyper_; }
  HyperParams& hyper_mutable() { return hyper_; }
  int input_size() const { return input_size_; }
  int action_count() const { return action_count_; }
  const net::QNetwork& online() const { return online_; }
  const net::QNetwork& target() const { return target_; }
  std::uint64_t train_step_count() const { return train_step_count_; }
  std::uint64_t act_step_count() const { return act_step_count_; }

  /// Online-network q-values for one observation.
  std::vector<double> forward(const env::Observation& obs) const;

  /// Linear anneal from epsilon_start to epsilon_final over
  /// epsilon_decay_steps act() calls.
  double current_epsilon() const;

  /// Epsilon-greedy action; advances act_step_count.
  int act(const env::Observation& obs, RngStream& rng);

  /// Deterministic argmax (lowest index on ties); act_step_count untouched.
  int greedy_action(const env::Observation& obs) const;

  /// One Adam step on the mean squared TD error over the batch. Returns the
  /// pre-step loss. Syncs the target network every target_sync_period steps.
  double train_step(const std::vector<const replay::Transition*>& batch);

  /// Max relative error between backprop and central finite differences over
  /// every online parameter, at the given perturbation.
  double gradient_check(const std::vector<const replay::Transition*>& batch,
                        double perturbation);

  /// Batch loss and the backprop gradient in flat_params order, without
  /// applying an update.
  std::pair<double, std::vector<double>> loss_and_gradient(
      const std::vector<const replay::Transition*>& batch);

  net::WeightSnapshot clone_weights() const;
  /// Loads a snapshot with the same architecture; anything else is rejected.
  void load_weights(const net::WeightSnapshot& snap);

  /// Population-based replacement: adopt new hyperparameters plus the weights
  /// that go with them (architecture may change). The behavior clock
  /// (act_step_count) keeps running; optimizer moments and the train-step
  /// clock start fresh.
  void replace_from(const HyperParams& hyper, const net::WeightSnapshot& snap);

 private:
  struct Workspace {
    std::vector<std::vector<double>> acts;     // acts[0] = input, acts[L] = output
    std::vector<std::vector<double>> preacts;  // preacts[l] = z of layer l
    std::vector<double> delta, dprev;
  };

  void rebuild(int input_size, const HyperParams& hyper);
  void forward_cached(const std::vector<double>& x);
  void accumulate_grads(int action, double dout);
  double loss_with_grads(const std::vector<const replay::Transition*>& batch,
                         const std::vector<double>& ys, bool want_grads);
  std::vector<double> targets_for(const std::vector<const replay::Transition*>& batch) const;

  int input_size_;
  int action_count_;
  HyperParams hyper_;
  net::QNetwork online_;
  net::QNetwork target_;
  std::vector<std::vector<double>> mw_, vw_, mb_, vb_;  // Adam moments per layer
  std::vector<std::vector<double>> gw_, gb_;            // gradient accumulators
  std::uint64_t train_step_count_ = 0;
  std::uint64_t act_step_count_ = 0;
  Workspace ws_;
};

}  // namespace abps::learner
