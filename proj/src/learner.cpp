// SPDX-License-Identifier: Apache-2.0
#include "abps/learner.hpp"

#include <algorithm>
#include <cmath>

#include "abps/error.hpp"
#include "abps/kernels.hpp"

namespace abps::learner {

namespace {
constexpr double kBeta1 = 0.9;
constexpr double kBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;
}  // namespace

void HyperParams::validate() const {
  require(!hidden_sizes.empty(), "hyper: hidden_sizes must be non-empty");
  for (int h : hidden_sizes) require(h >= 1, "hyper: hidden sizes must be positive");
  require(learning_rate > 0.0 && std::isfinite(learning_rate),
          "hyper: learning_rate must be positive and finite");
  require(epsilon_decay_steps >= 1, "hyper: epsilon_decay_steps must be >= 1");
  require(epsilon_start > 0.0 && epsilon_start <= 1.0,
          "hyper: epsilon_start must be in (0, 1]");
  require(epsilon_final >= 0.0 && epsilon_final < 1.0,
          "hyper: epsilon_final must be in [0, 1)");
  require(epsilon_final <= epsilon_start, "hyper: epsilon_final > epsilon_start");
  require(discount >= 0.0 && discount < 1.0, "hyper: discount must be in [0, 1)");
  require(target_sync_period >= 1, "hyper: target_sync_period must be >= 1");
}

Learner::Learner(int input_size, int action_count, HyperParams hyper,
                 std::uint64_t init_seed)
    : input_size_(input_size), action_count_(action_count), hyper_(std::move(hyper)) {
  require(action_count_ >= 1, "learner: action_count must be positive");
  hyper_.validate();
  rebuild(input_size_, hyper_);
  RngStream init_rng(init_seed);
  online_.init_weights(init_rng);
  target_ = online_;
}

void Learner::rebuild(int input_size, const HyperParams& hyper) {
  online_ = net::QNetwork(input_size, hyper.hidden_sizes, action_count_);
  target_ = online_;
  const auto& layers = online_.layers();
  const std::size_t L = layers.size();
  mw_.assign(L, {});
  vw_.assign(L, {});
  mb_.assign(L, {});
  vb_.assign(L, {});
  gw_.assign(L, {});
  gb_.assign(L, {});
  ws_.acts.assign(L + 1, {});
  ws_.preacts.assign(L, {});
  for (std::size_t i = 0; i < L; ++i) {
    mw_[i].assign(layers[i].w.size(), 0.0);
    vw_[i].assign(layers[i].w.size(), 0.0);
    mb_[i].assign(layers[i].b.size(), 0.0);
    vb_[i].assign(layers[i].b.size(), 0.0);
    gw_[i].assign(layers[i].w.size(), 0.0);
    gb_[i].assign(layers[i].b.size(), 0.0);
  }
}

std::vector<double> Learner::forward(const env::Observation& obs) const {
  return online_.forward(obs.features);
}

double Learner::current_epsilon() const {
  const double frac = std::min(
      1.0, static_cast<double>(act_step_count_) /
               static_cast<double>(hyper_.epsilon_decay_steps));
  return hyper_.epsilon_start + (hyper_.epsilon_final - hyper_.epsilon_start) * frac;
}

int Learner::act(const env::Observation& obs, RngStream& rng) {
  const double eps = current_epsilon();
  ++act_step_count_;
  if (rng.uniform01() < eps) {
    return static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(action_count_)));
  }
  return greedy_action(obs);
}

int Learner::greedy_action(const env::Observation& obs) const {
  const auto q = forward(obs);
  int best = 0;
  for (int a = 1; a < action_count_; ++a) {
    if (q[static_cast<std::size_t>(a)] > q[static_cast<std::size_t>(best)]) best = a;
  }
  return best;
}

void Learner::forward_cached(const std::vector<double>& x) {
  const auto& k = kernels::active();
  const auto& layers = online_.layers();
  ws_.acts[0] = x;
  for (std::size_t li = 0; li < layers.size(); ++li) {
    const auto& l = layers[li];
    auto& z = ws_.preacts[li];
    z.assign(static_cast<std::size_t>(l.rows), 0.0);
    k.matvec(z.data(), l.w.data(), ws_.acts[li].data(), l.b.data(),
             static_cast<std::size_t>(l.rows), static_cast<std::size_t>(l.cols));
    auto& a = ws_.acts[li + 1];
    a = z;
    if (li + 1 < layers.size()) k.relu(a.data(), a.size());
  }
}

void Learner::accumulate_grads(int action, double dout) {
  const auto& k = kernels::active();
  const auto& layers = online_.layers();
  auto& delta = ws_.delta;
  delta.assign(static_cast<std::size_t>(action_count_), 0.0);
  delta[static_cast<std::size_t>(action)] = dout;
  for (std::size_t li = layers.size(); li-- > 0;) {
    const auto& l = layers[li];
    const auto& a_in = ws_.acts[li];
    for (int r = 0; r < l.rows; ++r) {
      k.axpy(gw_[li].data() + static_cast<std::size_t>(r) * a_in.size(),
             delta[static_cast<std::size_t>(r)], a_in.data(), a_in.size());
    }
    k.axpy(gb_[li].data(), 1.0, delta.data(), delta.size());
    if (li == 0) break;
    auto& dprev = ws_.dprev;
    dprev.assign(a_in.size(), 0.0);
    for (int r = 0; r < l.rows; ++r) {
      k.axpy(dprev.data(), delta[static_cast<std::size_t>(r)],
             l.w.data() + static_cast<std::size_t>(r) * a_in.size(), a_in.size());
    }
    k.relu_backward(dprev.data(), ws_.preacts[li - 1].data(), dprev.size());
    delta.swap(dprev);
  }
}

std::vector<double> Learner::targets_for(
    const std::vector<const replay::Transition*>& batch) const {
  std::vector<double> ys;
  ys.reserve(batch.size());
  for (const auto* t : batch) {
    double y = t->r;
    if (!t->done) {
      const auto qn = target_.forward(t->s_next.features);
      y += hyper_.discount * *std::max_element(qn.begin(), qn.end());
    }
    ys.push_back(y);
  }
  return ys;
}

double Learner::loss_with_grads(const std::vector<const replay::Transition*>& batch,
                                const std::vector<double>& ys, bool want_grads) {
  if (want_grads) {
    for (auto& g : gw_) std::fill(g.begin(), g.end(), 0.0);
    for (auto& g : gb_) std::fill(g.begin(), g.end(), 0.0);
  }
  const double scale = 2.0 / static_cast<double>(batch.size());
  double loss_sum = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto* t = batch[i];
    require(t->a >= 0 && t->a < action_count_, "learner: action out of range in batch");
    forward_cached(t->s.features);
    const double diff = ws_.acts.back()[static_cast<std::size_t>(t->a)] - ys[i];
    loss_sum += diff * diff;
    if (want_grads) accumulate_grads(t->a, scale * diff);
  }
  return loss_sum / static_cast<double>(batch.size());
}

double Learner::train_step(const std::vector<const replay::Transition*>& batch) {
  require(!batch.empty(), "learner: train_step on empty batch");
  const auto ys = targets_for(batch);
  const double loss = loss_with_grads(batch, ys, true);
  require(std::isfinite(loss), "learner: non-finite loss (", loss,
          ") at train step ", train_step_count_ + 1, ", learning_rate ",
          hyper_.learning_rate, "; run aborted");

  ++train_step_count_;
  const double t = static_cast<double>(train_step_count_);
  const double bias1 = 1.0 - std::pow(kBeta1, t);
  const double bias2 = 1.0 - std::pow(kBeta2, t);
  const auto& k = kernels::active();
  auto& layers = online_.layers();
  for (std::size_t li = 0; li < layers.size(); ++li) {
    auto& l = layers[li];
    k.adam_step(l.w.data(), mw_[li].data(), vw_[li].data(), gw_[li].data(),
                l.w.size(), hyper_.learning_rate, kBeta1, kBeta2, kAdamEps,
                bias1, bias2);
    k.adam_step(l.b.data(), mb_[li].data(), vb_[li].data(), gb_[li].data(),
                l.b.size(), hyper_.learning_rate, kBeta1, kBeta2, kAdamEps,
                bias1, bias2);
  }
  if (train_step_count_ % hyper_.target_sync_period == 0) target_ = online_;
  return loss;
}

double Learner::gradient_check(const std::vector<const replay::Transition*>& batch,
                               double perturbation) {
  require(!batch.empty(), "learner: gradient_check on empty batch");
  require(perturbation >= 1e-7 && perturbation <= 1e-3,
          "learner: perturbation must be in [1e-7, 1e-3]");
  const auto ys = targets_for(batch);
  loss_with_grads(batch, ys, true);

  double max_err = 0.0;
  auto& layers = online_.layers();
  auto check_param = [&](double& p, double g_bp) {
    const double saved = p;
    p = saved + perturbation;
    const double lp = loss_with_grads(batch, ys, false);
    p = saved - perturbation;
    const double lm = loss_with_grads(batch, ys, false);
    p = saved;
    const double g_fd = (lp - lm) / (2.0 * perturbation);
    const double err = std::abs(g_fd - g_bp) / std::max(1e-8, std::abs(g_fd) + std::abs(g_bp));
    max_err = std::max(max_err, err);
  };
  for (std::size_t li = 0; li < layers.size(); ++li) {
    auto& l = layers[li];
    for (std::size_t i = 0; i < l.w.size(); ++i) check_param(l.w[i], gw_[li][i]);
    for (std::size_t i = 0; i < l.b.size(); ++i) check_param(l.b[i], gb_[li][i]);
  }
  return max_err;
}

std::pair<double, std::vector<double>> Learner::loss_and_gradient(
    const std::vector<const replay::Transition*>& batch) {
  require(!batch.empty(), "learner: loss_and_gradient on empty batch");
  const auto ys = targets_for(batch);
  const double loss = loss_with_grads(batch, ys, true);
  std::vector<double> flat;
  flat.reserve(online_.param_count());
  for (std::size_t li = 0; li < gw_.size(); ++li) {
    flat.insert(flat.end(), gw_[li].begin(), gw_[li].end());
    flat.insert(flat.end(), gb_[li].begin(), gb_[li].end());
  }
  return {loss, std::move(flat)};
}

net::WeightSnapshot Learner::clone_weights() const {
  net::WeightSnapshot snap;
  snap.input_size = input_size_;
  snap.output_size = action_count_;
  snap.hidden_sizes = hyper_.hidden_sizes;
  snap.online = online_.flat_params();
  snap.target = target_.flat_params();
  return snap;
}

void Learner::load_weights(const net::WeightSnapshot& snap) {
  require(snap.input_size == input_size_ && snap.output_size == action_count_ &&
              snap.hidden_sizes == hyper_.hidden_sizes,
          "learner: snapshot architecture mismatch");
  online_.set_flat_params(snap.online);
  target_.set_flat_params(snap.target);
}

void Learner::replace_from(const HyperParams& hyper, const net::WeightSnapshot& snap) {
  hyper.validate();
  require(snap.input_size == input_size_ && snap.output_size == action_count_ &&
              snap.hidden_sizes == hyper.hidden_sizes,
          "learner: replacement snapshot does not match new hyperparameters");
  hyper_ = hyper;
  rebuild(input_size_, hyper_);
  online_.set_flat_params(snap.online);
  target_.set_flat_params(snap.target);
  train_step_count_ = 0;
}

}  // namespace abps::learner
