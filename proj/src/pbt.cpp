// SPDX-License-Identifier: Apache-2.0
#include "abps/pbt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "abps/error.hpp"
#include "abps/training.hpp"

namespace abps::pbt {

void PbtConfig::validate() const {
  require(pbt_period_multiplier >= 1, "pbt config: pbt_period_multiplier must be >= 1");
  require(truncation_fraction > 0.0 && truncation_fraction <= 0.5,
          "pbt config: truncation_fraction must be in (0, 0.5], got ", truncation_fraction);
  require(perturb_down > 0.0 && perturb_down <= 1.0,
          "pbt config: perturb_down must be in (0, 1], got ", perturb_down);
  require(perturb_up >= 1.0, "pbt config: perturb_up must be >= 1, got ", perturb_up);
  require(learning_rate_min > 0.0 && learning_rate_min <= learning_rate_max,
          "pbt config: learning rate range must be ordered and positive");
  require(epsilon_decay_min >= 1 && epsilon_decay_min <= epsilon_decay_max,
          "pbt config: epsilon decay range must be ordered and >= 1");
}

std::uint64_t PbtConfig::effective_staleness_threshold() const {
  return staleness_threshold == 0 ? 2 * pbt_period_multiplier : staleness_threshold;
}

bool pbt_ready(std::uint64_t selection_round, const PbtConfig& cfg) {
  return selection_round > 0 && selection_round % cfg.pbt_period_multiplier == 0;
}

std::vector<std::size_t> rank_pool_by_mean(const bandit::Bandit& bandit) {
  std::vector<std::size_t> order(bandit.arm_count());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return bandit.arm(a).mean > bandit.arm(b).mean;
  });
  return order;
}

std::optional<RefreshOutcome> refresh_if_stale(const AgentSlot& agent,
                                               bandit::Bandit& bandit,
                                               std::uint64_t now,
                                               std::uint64_t staleness_threshold,
                                               const env::EnvSpec& spec,
                                               int eval_episodes,
                                               std::uint64_t seed_base) {
  if (!bandit.is_stale(agent.arm_index, now, staleness_threshold)) return std::nullopt;
  const auto out = training::online_evaluation(agent.learner, spec, eval_episodes, seed_base);
  bandit.update(agent.arm_index, out.mean_return, now);
  return RefreshOutcome{out.mean_return, out.env_steps};
}

std::optional<ExploitOutcome> exploit(std::size_t agent_index,
                                      std::vector<AgentSlot>& pool,
                                      bandit::Bandit& bandit,
                                      const std::vector<std::size_t>& ranking,
                                      double truncation_fraction, RngStream& rng) {
  require(agent_index < pool.size(), "exploit: agent_index out of range");
  require(ranking.size() == pool.size(), "exploit: ranking size mismatch");
  const std::size_t cut =
      static_cast<std::size_t>(std::floor(static_cast<double>(pool.size()) * truncation_fraction));
  if (cut == 0) return std::nullopt;

  const auto pos = std::find(ranking.begin(), ranking.end(), agent_index) - ranking.begin();
  if (static_cast<std::size_t>(pos) < pool.size() - cut) return std::nullopt;

  const std::size_t src_index = ranking[rng.uniform_int(cut)];
  AgentSlot& dst = pool[agent_index];
  const AgentSlot& src = pool[src_index];
  ExploitOutcome out{src.arm_index, dst.learner.hyper(), src.learner.hyper()};
  dst.learner.replace_from(src.learner.hyper(), src.learner.clone_weights());
  bandit.substitute_arm(dst.arm_index, src.arm_index);
  return out;
}

std::optional<ExploitOutcome> exploit(std::size_t agent_index,
                                      std::vector<AgentSlot>& pool,
                                      bandit::Bandit& bandit,
                                      double truncation_fraction, RngStream& rng) {
  return exploit(agent_index, pool, bandit, rank_pool_by_mean(bandit), truncation_fraction,
                 rng);
}

learner::HyperParams explore(const learner::HyperParams& hyper, const PbtConfig& cfg,
                             RngStream& rng) {
  learner::HyperParams out = hyper;
  if (cfg.mutate_learning_rate) {
    const double factor = rng.uniform01() < 0.5 ? cfg.perturb_down : cfg.perturb_up;
    out.learning_rate =
        std::clamp(out.learning_rate * factor, cfg.learning_rate_min, cfg.learning_rate_max);
  }
  if (cfg.mutate_epsilon_decay) {
    const double factor = rng.uniform01() < 0.5 ? cfg.perturb_down : cfg.perturb_up;
    const double scaled =
        std::round(static_cast<double>(out.epsilon_decay_steps) * factor);
    const auto raw = static_cast<std::uint64_t>(std::max(1.0, scaled));
    out.epsilon_decay_steps = std::clamp(raw, cfg.epsilon_decay_min, cfg.epsilon_decay_max);
  }
  out.validate();
  return out;
}

}  // namespace abps::pbt
