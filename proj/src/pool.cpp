// SPDX-License-Identifier: Apache-2.0
#include "abps/pool.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "abps/error.hpp"

namespace abps::pool {

void PoolPrior::validate() const {
  require(!architectures.empty(), "pool prior: need at least one architecture");
  double total = 0.0;
  for (const auto& a : architectures) {
    require(!a.hidden_sizes.empty(), "pool prior: architecture '", a.name,
            "' has no hidden sizes");
    for (int h : a.hidden_sizes)
      require(h >= 1, "pool prior: architecture '", a.name, "' has a non-positive size");
    require(a.probability >= 0.0, "pool prior: negative probability for '", a.name, "'");
    total += a.probability;
  }
  require(std::abs(total - 1.0) <= 1e-12, "pool prior: probabilities sum to ", total,
          ", expected 1");
  require(size_perturbation_min > 0.0 && size_perturbation_min <= size_perturbation_max,
          "pool prior: size perturbation range out of order");
  require(learning_rate_min > 0.0 && learning_rate_min <= learning_rate_max,
          "pool prior: learning rate range out of order");
  require(epsilon_decay_min >= 1 && epsilon_decay_min <= epsilon_decay_max,
          "pool prior: epsilon decay range out of order");
  require(k >= 1, "pool prior: k must be >= 1");
}

PoolPrior default_prior() {
  PoolPrior p;
  p.architectures = {{"normal", {64}, 0.2},
                     {"wide", {256}, 0.2},
                     {"deep", {64, 64, 64}, 0.2},
                     {"small", {8}, 0.4}};
  return p;
}

namespace {

std::size_t draw_categorical(const std::vector<ArchChoice>& choices, RngStream& rng) {
  const double u = rng.uniform01();
  double cum = 0.0;
  std::size_t picked = choices.size() - 1;
  for (std::size_t i = 0; i < choices.size(); ++i) {
    cum += choices[i].probability;
    if (u < cum) {
      picked = i;
      break;
    }
  }
  return picked;
}

double log_uniform(double lo, double hi, RngStream& rng) {
  return std::exp(rng.uniform_range(std::log(lo), std::log(hi)));
}

}  // namespace

std::vector<learner::HyperParams> sample_pool(const PoolPrior& prior, RngStream& rng) {
  prior.validate();
  std::vector<learner::HyperParams> out;
  out.reserve(prior.k);
  for (std::size_t i = 0; i < prior.k; ++i) {
    learner::HyperParams h;
    const auto& arch = prior.architectures[draw_categorical(prior.architectures, rng)];
    h.hidden_sizes.clear();
    for (int size : arch.hidden_sizes) {
      const double factor =
          rng.uniform_range(prior.size_perturbation_min, prior.size_perturbation_max);
      h.hidden_sizes.push_back(
          std::max(1, static_cast<int>(std::lround(factor * static_cast<double>(size)))));
    }
    h.learning_rate = log_uniform(prior.learning_rate_min, prior.learning_rate_max, rng);
    const double decay = std::round(log_uniform(static_cast<double>(prior.epsilon_decay_min),
                                                static_cast<double>(prior.epsilon_decay_max), rng));
    h.epsilon_decay_steps =
        std::clamp(static_cast<std::uint64_t>(decay), prior.epsilon_decay_min,
                   prior.epsilon_decay_max);
    h.validate();
    out.push_back(std::move(h));
  }
  return out;
}

std::string architecture_label(const std::vector<int>& hidden_sizes) {
  if (hidden_sizes.size() >= 3) return "deep";
  if (hidden_sizes.size() == 1) {
    if (hidden_sizes[0] < 32) return "small";
    if (hidden_sizes[0] < 128) return "normal";
    return "wide";
  }
  return "custom";
}

std::string decade_label(double value) {
  require(value > 0.0, "decade_label: value must be positive");
  const int e = static_cast<int>(std::floor(std::log10(value)));
  std::ostringstream os;
  os << "1e" << e << "..1e" << e + 1;
  return os.str();
}

}  // namespace abps::pool
