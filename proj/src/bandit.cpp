// SPDX-License-Identifier: Apache-2.0
#include "abps/bandit.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "abps/error.hpp"

namespace abps::bandit {

void Strategy::validate() const {
  switch (kind) {
    case StrategyKind::kRandom:
      break;
    case StrategyKind::kUcb:
      require(xi > 0.0 && std::isfinite(xi), "strategy: xi must be positive");
      break;
    case StrategyKind::kEpsilonGreedy:
      require(epsilon_b >= 0.0 && epsilon_b <= 1.0,
              "strategy: epsilon_b must be in [0, 1]");
      break;
    case StrategyKind::kSoftmax:
      require(temperature > 0.0 && std::isfinite(temperature),
              "strategy: temperature must be positive");
      break;
  }
}

const char* strategy_name(StrategyKind k) {
  switch (k) {
    case StrategyKind::kRandom: return "random";
    case StrategyKind::kUcb: return "ucb";
    case StrategyKind::kEpsilonGreedy: return "epsilon_greedy";
    case StrategyKind::kSoftmax: return "softmax";
  }
  fail("strategy_name: bad enum value");
}

StrategyKind strategy_from_name(const std::string& name) {
  if (name == "random") return StrategyKind::kRandom;
  if (name == "ucb") return StrategyKind::kUcb;
  if (name == "epsilon_greedy") return StrategyKind::kEpsilonGreedy;
  if (name == "softmax") return StrategyKind::kSoftmax;
  fail("unknown bandit strategy '", name, "'");
}

Bandit::Bandit(const std::vector<double>& initial_rewards, Mode mode,
               std::uint64_t window_length)
    : mode_(mode), window_length_(window_length) {
  require(!initial_rewards.empty(), "bandit: need at least one arm");
  require(window_length >= 1, "bandit: window_length must be >= 1");
  for (std::size_t i = 0; i < initial_rewards.size(); ++i) {
    const double r = initial_rewards[i];
    require(std::isfinite(r), "bandit: non-finite initial reward");
    ArmState a;
    a.mean = r;
    a.pulls = 1;
    a.total_updates = 1;
    a.last_update_time = i + 1;
    if (mode_ == Mode::kSliding) a.window = {{i + 1, r}};
    arms_.push_back(std::move(a));
  }
  time_ = arms_.size();
}

Bandit::Bandit(std::vector<ArmState> arms, std::uint64_t time, Mode mode,
               std::uint64_t window_length)
    : arms_(std::move(arms)), time_(time), mode_(mode), window_length_(window_length) {
  require(!arms_.empty(), "bandit: need at least one arm");
  require(window_length >= 1, "bandit: window_length must be >= 1");
}

const ArmState& Bandit::arm(std::size_t i) const {
  require(i < arms_.size(), "bandit: arm index out of range");
  return arms_[i];
}

void Bandit::prune_window(ArmState& a, std::uint64_t now) const {
  auto first_kept = a.window.begin();
  while (first_kept != a.window.end() && first_kept->time + window_length_ <= now) {
    ++first_kept;
  }
  if (first_kept == a.window.begin()) return;
  a.window.erase(a.window.begin(), first_kept);
  a.pulls = a.window.size();
  double sum = 0.0;
  for (const auto& e : a.window) sum += e.reward;
  a.mean = a.window.empty() ? 0.0 : sum / static_cast<double>(a.window.size());
}

std::uint64_t Bandit::visit_count(std::size_t i, const Strategy& strategy) const {
  if (mode_ == Mode::kSliding && !strategy.ucb_window_counts) {
    return arms_[i].total_updates;
  }
  return arms_[i].pulls;
}

std::size_t Bandit::argmax_mean() const {
  std::size_t best = 0;
  for (std::size_t i = 1; i < arms_.size(); ++i) {
    if (arms_[i].mean > arms_[best].mean) best = i;
  }
  return best;
}

std::size_t Bandit::select(const Strategy& strategy, RngStream& rng) {
  strategy.validate();
  if (mode_ == Mode::kSliding) {
    for (auto& a : arms_) prune_window(a, time_);
  }

  std::size_t picked = 0;
  switch (strategy.kind) {
    case StrategyKind::kRandom:
      picked = static_cast<std::size_t>(rng.uniform_int(arms_.size()));
      break;
    case StrategyKind::kUcb: {
      require(time_ >= 1, "bandit: select before initialization");
      bool forced = false;
      for (std::size_t i = 0; i < arms_.size(); ++i) {
        if (visit_count(i, strategy) == 0) {
          picked = i;
          forced = true;
          break;
        }
      }
      if (!forced) {
        const double log_t = std::log(static_cast<double>(time_));
        double best_score = 0.0;
        for (std::size_t i = 0; i < arms_.size(); ++i) {
          const double n = static_cast<double>(visit_count(i, strategy));
          const double score = arms_[i].mean + std::sqrt(strategy.xi * log_t / n);
          if (i == 0 || score > best_score) {
            best_score = score;
            picked = i;
          }
        }
      }
      break;
    }
    case StrategyKind::kEpsilonGreedy:
      if (rng.uniform01() < strategy.epsilon_b) {
        picked = static_cast<std::size_t>(rng.uniform_int(arms_.size()));
      } else {
        picked = argmax_mean();
      }
      break;
    case StrategyKind::kSoftmax: {
      const auto p = softmax_probabilities(strategy);
      const double u = rng.uniform01();
      double cum = 0.0;
      for (std::size_t i = 0; i < p.size(); ++i) {
        picked = i;
        cum += p[i];
        if (u < cum) break;
      }
      break;
    }
  }
  ++time_;
  return picked;
}

void Bandit::update(std::size_t arm, double reward, std::uint64_t now) {
  require(arm < arms_.size(), "bandit: arm index out of range");
  require(std::isfinite(reward), "bandit: non-finite reward");
  auto& a = arms_[arm];
  if (mode_ == Mode::kCumulative) {
    const double n = static_cast<double>(a.pulls);
    a.mean = (n * a.mean + reward) / (n + 1.0);
    a.pulls += 1;
  } else {
    require(a.window.empty() || a.window.back().time <= now,
            "bandit: update times must be non-decreasing");
    a.window.push_back({now, reward});
    a.pulls = a.window.size();
    prune_window(a, now);
    double sum = 0.0;
    for (const auto& e : a.window) sum += e.reward;
    a.mean = a.window.empty() ? 0.0 : sum / static_cast<double>(a.window.size());
  }
  a.total_updates += 1;
  a.last_update_time = now;
}

void Bandit::substitute_arm(std::size_t dst, std::size_t src) {
  require(dst < arms_.size() && src < arms_.size(), "bandit: arm index out of range");
  if (dst == src) return;
  arms_[dst] = arms_[src];
}

bool Bandit::is_stale(std::size_t arm, std::uint64_t now,
                      std::uint64_t staleness_threshold) const {
  require(arm < arms_.size(), "bandit: arm index out of range");
  const auto& a = arms_[arm];
  require(now >= a.last_update_time, "bandit: staleness query in the past");
  return now - a.last_update_time > staleness_threshold;
}

std::vector<double> Bandit::softmax_probabilities(const Strategy& strategy) const {
  double max_mean = arms_[0].mean;
  for (const auto& a : arms_) max_mean = std::max(max_mean, a.mean);
  std::vector<double> p(arms_.size());
  double total = 0.0;
  for (std::size_t i = 0; i < arms_.size(); ++i) {
    p[i] = std::exp((arms_[i].mean - max_mean) / strategy.temperature);
    total += p[i];
  }
  for (auto& v : p) v /= total;
  return p;
}

}  // namespace abps::bandit
