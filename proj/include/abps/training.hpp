// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "abps/agent.hpp"
#include "abps/bandit.hpp"
#include "abps/checkpoint.hpp"
#include "abps/env.hpp"
#include "abps/pbt.hpp"
#include "abps/replay.hpp"
#include "abps/rng.hpp"

namespace abps::training {

/// Purpose tags mixed into derive_seed so every random stream in a run is
/// independent. Exposed so tests can reconstruct any stream.
namespace seed_ns {
inline constexpr std::uint64_t kInit = 1;          // weight initialization
inline constexpr std::uint64_t kBehavior = 2;      // behavior-policy actions
inline constexpr std::uint64_t kBatch = 3;         // replay sampling
inline constexpr std::uint64_t kBandit = 4;        // strategy draws
inline constexpr std::uint64_t kTrainEpisode = 5;  // training episode seeds
inline constexpr std::uint64_t kInitEval = 6;      // initial evaluation episodes
inline constexpr std::uint64_t kEval = 7;          // epoch evaluation episodes
inline constexpr std::uint64_t kStaleEval = 8;     // staleness refresh episodes
inline constexpr std::uint64_t kPbt = 9;           // exploit/explore draws
inline constexpr std::uint64_t kPool = 10;         // pool sampling from a prior
}  // namespace seed_ns

struct AbpsConfig {
  int m = 1;                      // episodes per selection period
  int n_init_eval_episodes = 5;   // greedy episodes seeding each arm
  int eval_episodes = 50;         // per agent per evaluation epoch
  std::uint64_t eval_period = 2000;  // env steps per epoch
  std::uint64_t total_env_steps = 100000;
  bandit::Strategy strategy;
  bandit::Mode bandit_mode = bandit::Mode::kCumulative;
  std::uint64_t window_length = 25;
  std::size_t batch_size = 32;
  std::size_t learn_start = 0;  // 0 means max(batch_size, 100)
  std::size_t buffer_capacity = 50000;

  void validate() const;
  std::size_t effective_learn_start() const;
};

struct RunConfig {
  env::EnvSpec env;
  std::vector<learner::HyperParams> pool;
  AbpsConfig abps;
  pbt::PbtConfig pbt;
  std::uint64_t run_seed = 0;

  void validate() const;
};

struct EvalRow {
  std::uint64_t epoch;
  std::uint64_t env_steps;
  int agent_id;
  double mean_return;
};

struct SelectionEvent {
  std::uint64_t round;  // bandit time at which the arm was pulled
  std::size_t arm;
  double period_reward;
};

struct PbtEvent {
  std::uint64_t round;  // selection period index
  int agent_id;
  std::string action;  // exploit | explore | stale-eval
  int src_agent;       // -1 when not a copy
  double old_learning_rate, new_learning_rate;
  std::uint64_t old_epsilon_decay_steps, new_epsilon_decay_steps;
};

struct TrainingLog {
  std::vector<EvalRow> eval_rows;
  std::vector<SelectionEvent> selections;
  std::vector<PbtEvent> events;
  std::uint64_t env_step_counter = 0;   // training interactions consumed
  std::uint64_t eval_env_steps = 0;     // evaluation interactions, kept apart
};

struct EvalOutcome {
  double mean_return;
  std::uint64_t env_steps;
};

/// Greedy evaluation on fresh environment instances. Episode j uses seed
/// derive_seed(seed_base, j); nothing touches the replay buffer, the agent's
/// counters, or any training stream.
EvalOutcome online_evaluation(const learner::Learner& agent, const env::EnvSpec& spec,
                              int episodes, std::uint64_t seed_base);

/// Per-agent greedy returns used to seed the bandit arms. All agents see the
/// same evaluation episodes.
std::vector<EvalOutcome> initial_evaluation(const std::vector<AgentSlot>& pool,
                                            const env::EnvSpec& spec, int episodes,
                                            std::uint64_t run_seed);

/// One ABPS (or ABPS-PBT, when cfg.pbt.enabled) run. Stepwise access exists
/// for audits; run() drives it to the step budget.
class TrainingRun {
 public:
  explicit TrainingRun(const RunConfig& cfg);

  TrainingLog run();

  struct PeriodOutcome {
    std::size_t arm;
    int completed_episodes;
    double mean_reward;
    bool bandit_updated;
  };
  bool done() const { return env_steps_ >= cfg_.abps.total_env_steps; }
  /// One select -> m-episode rollout -> arm update (-> PBT when scheduled).
  PeriodOutcome step_period();

  const bandit::Bandit& bandit_state() const { return *bandit_; }
  const std::vector<AgentSlot>& pool() const { return agents_; }
  const replay::ReplayBuffer& buffer() const { return buffer_; }
  std::uint64_t env_steps() const { return env_steps_; }
  std::uint64_t selection_rounds() const { return period_round_; }
  const TrainingLog& log() const { return log_; }

  /// Full state export: pool weights + hypers, bandit statistics, buffer
  /// metadata, RNG cursors.
  checkpoint::Checkpoint checkpoint() const;

 private:
  struct PeriodResult {
    int episodes = 0;
    double mean = 0.0;
  };
  PeriodResult run_period(std::size_t arm);
  void run_eval_epoch();
  void run_pbt_phase();

  RunConfig cfg_;
  env::Env env_;
  replay::ReplayBuffer buffer_;
  std::vector<AgentSlot> agents_;
  std::optional<bandit::Bandit> bandit_;
  std::vector<RngStream> behavior_rng_;
  std::vector<RngStream> batch_rng_;
  RngStream bandit_rng_;
  RngStream pbt_rng_;
  std::uint64_t env_steps_ = 0;
  std::uint64_t episode_counter_ = 0;
  std::uint64_t period_round_ = 0;
  std::size_t learn_start_;
  TrainingLog log_;
};

TrainingLog run_abps(const RunConfig& cfg);
TrainingLog run_abps_pbt(const RunConfig& cfg);

/// K independent single-agent runs (same run_seed, own buffers and streams),
/// merged into one log. Consumes K x total_env_steps interactions; selection
/// and PBT event lists stay empty.
TrainingLog run_independent_baseline(const RunConfig& cfg);

}  // namespace abps::training
