// SPDX-License-Identifier: Apache-2.0
#include "abps/training.hpp"

#include <algorithm>
#include <utility>

#include "abps/error.hpp"

namespace abps::training {

void AbpsConfig::validate() const {
  require(m >= 1, "abps config: m must be >= 1, got ", m);
  require(n_init_eval_episodes >= 1, "abps config: n_init_eval_episodes must be >= 1");
  require(eval_episodes >= 1, "abps config: eval_episodes must be >= 1");
  require(eval_period >= 1, "abps config: eval_period must be >= 1");
  require(batch_size >= 1, "abps config: batch_size must be >= 1");
  require(buffer_capacity >= 1, "abps config: buffer_capacity must be >= 1");
  require(window_length >= 1, "abps config: window_length must be >= 1");
  strategy.validate();
}

std::size_t AbpsConfig::effective_learn_start() const {
  return learn_start == 0 ? std::max<std::size_t>(batch_size, 100) : learn_start;
}

void RunConfig::validate() const {
  require(!pool.empty(), "run config: pool must hold at least one agent");
  for (const auto& h : pool) h.validate();
  abps.validate();
  pbt.validate();
}

EvalOutcome online_evaluation(const learner::Learner& agent, const env::EnvSpec& spec,
                              int episodes, std::uint64_t seed_base) {
  require(episodes >= 1, "online_evaluation: episodes must be >= 1");
  double total = 0.0;
  std::uint64_t steps = 0;
  for (int j = 0; j < episodes; ++j) {
    env::Env e(spec);
    auto obs = e.reset(derive_seed(seed_base, static_cast<std::uint64_t>(j)));
    double ret = 0.0;
    while (true) {
      const auto sr = e.step(agent.greedy_action(obs));
      ret += sr.reward;
      ++steps;
      if (sr.done) break;
      obs = sr.observation;
    }
    total += ret;
  }
  return {total / episodes, steps};
}

std::vector<EvalOutcome> initial_evaluation(const std::vector<AgentSlot>& pool,
                                            const env::EnvSpec& spec, int episodes,
                                            std::uint64_t run_seed) {
  const std::uint64_t base = derive_seed(run_seed, seed_ns::kInitEval);
  std::vector<EvalOutcome> out;
  out.reserve(pool.size());
  for (const auto& ag : pool) out.push_back(online_evaluation(ag.learner, spec, episodes, base));
  return out;
}

namespace {
const RunConfig& checked(const RunConfig& cfg) {
  cfg.validate();
  return cfg;
}
}  // namespace

TrainingRun::TrainingRun(const RunConfig& cfg)
    : cfg_(checked(cfg)),
      env_(cfg_.env),
      buffer_(cfg_.abps.buffer_capacity),
      bandit_rng_(derive_seed(cfg_.run_seed, seed_ns::kBandit)),
      pbt_rng_(derive_seed(cfg_.run_seed, seed_ns::kPbt)),
      learn_start_(cfg_.abps.effective_learn_start()) {
  const auto k = cfg_.pool.size();
  agents_.reserve(k);
  behavior_rng_.reserve(k);
  batch_rng_.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    agents_.push_back({learner::Learner(env_.feature_size(), env_.action_count(), cfg_.pool[i],
                                        derive_seed(cfg_.run_seed, seed_ns::kInit, i)),
                       static_cast<int>(i), i});
    behavior_rng_.emplace_back(derive_seed(cfg_.run_seed, seed_ns::kBehavior, i));
    batch_rng_.emplace_back(derive_seed(cfg_.run_seed, seed_ns::kBatch, i));
  }

  const auto evals =
      initial_evaluation(agents_, cfg_.env, cfg_.abps.n_init_eval_episodes, cfg_.run_seed);
  std::vector<double> means;
  means.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    log_.eval_rows.push_back({0, 0, agents_[i].agent_id, evals[i].mean_return});
    log_.eval_env_steps += evals[i].env_steps;
    means.push_back(evals[i].mean_return);
  }
  bandit_.emplace(means, cfg_.abps.bandit_mode, cfg_.abps.window_length);
}

TrainingRun::PeriodResult TrainingRun::run_period(std::size_t arm) {
  PeriodResult out;
  double sum = 0.0;
  for (int e = 0; e < cfg_.abps.m && env_steps_ < cfg_.abps.total_env_steps; ++e) {
    auto obs = env_.reset(derive_seed(cfg_.run_seed, seed_ns::kTrainEpisode, episode_counter_));
    ++episode_counter_;
    double ret = 0.0;
    bool completed = false;
    while (env_steps_ < cfg_.abps.total_env_steps) {
      const int a = agents_[arm].learner.act(obs, behavior_rng_[arm]);
      auto sr = env_.step(a);
      buffer_.push({obs, a, sr.reward, sr.observation, sr.done});
      ret += sr.reward;
      ++env_steps_;
      ++log_.env_step_counter;
      if (buffer_.size() >= learn_start_) {
        for (auto& ag : agents_) {
          ag.learner.train_step(
              buffer_.sample(cfg_.abps.batch_size, batch_rng_[static_cast<std::size_t>(ag.agent_id)]));
        }
      }
      if (env_steps_ % cfg_.abps.eval_period == 0) run_eval_epoch();
      if (sr.done) {
        completed = true;
        break;
      }
      obs = std::move(sr.observation);
    }
    if (completed) {
      ++out.episodes;
      sum += ret;
    }
  }
  if (out.episodes > 0) out.mean = sum / out.episodes;
  return out;
}

void TrainingRun::run_eval_epoch() {
  const std::uint64_t epoch = env_steps_ / cfg_.abps.eval_period;
  const std::uint64_t base = derive_seed(cfg_.run_seed, seed_ns::kEval, epoch);
  for (const auto& ag : agents_) {
    const auto out = online_evaluation(ag.learner, cfg_.env, cfg_.abps.eval_episodes, base);
    log_.eval_rows.push_back({epoch, env_steps_, ag.agent_id, out.mean_return});
    log_.eval_env_steps += out.env_steps;
  }
}

void TrainingRun::run_pbt_phase() {
  const std::uint64_t now = bandit_->time();
  const std::uint64_t threshold = cfg_.pbt.effective_staleness_threshold();
  for (const auto& ag : agents_) {
    const auto seed = derive_seed(cfg_.run_seed, seed_ns::kStaleEval, period_round_,
                                  static_cast<std::uint64_t>(ag.agent_id));
    const auto refreshed = pbt::refresh_if_stale(ag, *bandit_, now, threshold, cfg_.env,
                                                 cfg_.abps.eval_episodes, seed);
    if (refreshed) {
      log_.eval_env_steps += refreshed->eval_env_steps;
      const auto& h = ag.learner.hyper();
      log_.events.push_back({period_round_, ag.agent_id, "stale-eval", -1, h.learning_rate,
                             h.learning_rate, h.epsilon_decay_steps, h.epsilon_decay_steps});
    }
  }
  const auto ranking = pbt::rank_pool_by_mean(*bandit_);
  for (std::size_t i = 0; i < agents_.size(); ++i) {
    const auto ex =
        pbt::exploit(i, agents_, *bandit_, ranking, cfg_.pbt.truncation_fraction, pbt_rng_);
    if (!ex) continue;
    log_.events.push_back({period_round_, agents_[i].agent_id, "exploit",
                           static_cast<int>(ex->src_arm), ex->old_hyper.learning_rate,
                           ex->new_hyper.learning_rate, ex->old_hyper.epsilon_decay_steps,
                           ex->new_hyper.epsilon_decay_steps});
    const auto mutated = pbt::explore(agents_[i].learner.hyper(), cfg_.pbt, pbt_rng_);
    log_.events.push_back({period_round_, agents_[i].agent_id, "explore", -1,
                           ex->new_hyper.learning_rate, mutated.learning_rate,
                           ex->new_hyper.epsilon_decay_steps, mutated.epsilon_decay_steps});
    agents_[i].learner.hyper_mutable() = mutated;
  }
}

checkpoint::Checkpoint TrainingRun::checkpoint() const {
  checkpoint::Checkpoint c;
  c.run_seed = cfg_.run_seed;
  c.env_steps = env_steps_;
  c.episode_counter = episode_counter_;
  c.period_round = period_round_;
  for (std::size_t i = 0; i < agents_.size(); ++i) {
    c.hypers.push_back(agents_[i].learner.hyper());
    c.weights.push_back(agents_[i].learner.clone_weights());
    c.act_step_counts.push_back(agents_[i].learner.act_step_count());
    c.train_step_counts.push_back(agents_[i].learner.train_step_count());
    c.behavior_rng.push_back(behavior_rng_[i].state_string());
    c.batch_rng.push_back(batch_rng_[i].state_string());
  }
  c.arms = bandit_->arms();
  c.bandit_time = bandit_->time();
  c.bandit_mode = bandit_->mode();
  c.window_length = bandit_->window_length();
  c.buffer_capacity = buffer_.capacity();
  c.buffer_insert_count = buffer_.insert_count();
  c.bandit_rng = bandit_rng_.state_string();
  c.pbt_rng = pbt_rng_.state_string();
  return c;
}

TrainingRun::PeriodOutcome TrainingRun::step_period() {
  require(!done(), "step_period: interaction budget exhausted");
  const std::size_t arm = bandit_->select(cfg_.abps.strategy, bandit_rng_);
  const std::uint64_t now = bandit_->time();
  const PeriodResult pr = run_period(arm);
  const bool updated = pr.episodes > 0;
  if (updated) {
    bandit_->update(arm, pr.mean, now);
    log_.selections.push_back({now, arm, pr.mean});
  }
  ++period_round_;
  if (cfg_.pbt.enabled && pbt::pbt_ready(period_round_, cfg_.pbt) && !done()) run_pbt_phase();
  return {arm, pr.episodes, pr.mean, updated};
}

TrainingLog TrainingRun::run() {
  while (!done()) step_period();
  return log_;
}

TrainingLog run_abps(const RunConfig& cfg) {
  RunConfig plain = cfg;
  plain.pbt.enabled = false;
  return TrainingRun(plain).run();
}

TrainingLog run_abps_pbt(const RunConfig& cfg) {
  RunConfig with_pbt = cfg;
  with_pbt.pbt.enabled = true;
  return TrainingRun(with_pbt).run();
}

TrainingLog run_independent_baseline(const RunConfig& cfg) {
  cfg.validate();
  TrainingLog merged;
  for (std::size_t j = 0; j < cfg.pool.size(); ++j) {
    RunConfig sub = cfg;
    sub.pool = {cfg.pool[j]};
    sub.pbt.enabled = false;
    const TrainingLog part = run_abps(sub);
    for (auto row : part.eval_rows) {
      row.agent_id = static_cast<int>(j);
      merged.eval_rows.push_back(row);
    }
    merged.env_step_counter += part.env_step_counter;
    merged.eval_env_steps += part.eval_env_steps;
  }
  std::stable_sort(merged.eval_rows.begin(), merged.eval_rows.end(),
                   [](const EvalRow& a, const EvalRow& b) {
                     if (a.epoch != b.epoch) return a.epoch < b.epoch;
                     return a.agent_id < b.agent_id;
                   });
  return merged;
}

}  // namespace abps::training
