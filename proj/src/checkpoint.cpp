// SPDX-License-Identifier: Apache-2.0
#include "abps/checkpoint.hpp"

#include <fstream>

#include "abps/bytes.hpp"
#include "abps/csv.hpp"
#include "abps/error.hpp"

namespace abps::checkpoint {

namespace {

constexpr std::uint64_t kMagic = 0x414250534B505431ull;  // "ABPSKPT1"

void append_hyper(std::vector<std::uint8_t>& out, const learner::HyperParams& h) {
  bytes::append_u64(out, h.hidden_sizes.size());
  for (int s : h.hidden_sizes) bytes::append_u64(out, static_cast<std::uint64_t>(s));
  bytes::append_f64(out, h.learning_rate);
  bytes::append_u64(out, h.epsilon_decay_steps);
  bytes::append_f64(out, h.epsilon_start);
  bytes::append_f64(out, h.epsilon_final);
  bytes::append_f64(out, h.discount);
  bytes::append_u64(out, h.target_sync_period);
}

learner::HyperParams read_hyper(bytes::Reader& r) {
  learner::HyperParams h;
  h.hidden_sizes.clear();
  const auto n = r.read_u64();
  for (std::uint64_t i = 0; i < n; ++i)
    h.hidden_sizes.push_back(static_cast<int>(r.read_u64()));
  h.learning_rate = r.read_f64();
  h.epsilon_decay_steps = r.read_u64();
  h.epsilon_start = r.read_f64();
  h.epsilon_final = r.read_f64();
  h.discount = r.read_f64();
  h.target_sync_period = r.read_u64();
  return h;
}

void append_snapshot(std::vector<std::uint8_t>& out, const net::WeightSnapshot& s) {
  const auto buf = s.to_bytes();
  bytes::append_string(out, std::string(buf.begin(), buf.end()));
}

net::WeightSnapshot read_snapshot(bytes::Reader& r) {
  const auto text = r.read_string();
  return net::WeightSnapshot::from_bytes(std::vector<std::uint8_t>(text.begin(), text.end()));
}

void append_arm(std::vector<std::uint8_t>& out, const bandit::ArmState& a) {
  bytes::append_f64(out, a.mean);
  bytes::append_u64(out, a.pulls);
  bytes::append_u64(out, a.total_updates);
  bytes::append_u64(out, a.last_update_time);
  bytes::append_u64(out, a.window.size());
  for (const auto& w : a.window) {
    bytes::append_u64(out, w.time);
    bytes::append_f64(out, w.reward);
  }
}

bandit::ArmState read_arm(bytes::Reader& r) {
  bandit::ArmState a;
  a.mean = r.read_f64();
  a.pulls = r.read_u64();
  a.total_updates = r.read_u64();
  a.last_update_time = r.read_u64();
  const auto n = r.read_u64();
  for (std::uint64_t i = 0; i < n; ++i) {
    bandit::WindowEntry w;
    w.time = r.read_u64();
    w.reward = r.read_f64();
    a.window.push_back(w);
  }
  return a;
}

}  // namespace

std::vector<std::uint8_t> Checkpoint::to_bytes() const {
  require(hypers.size() == weights.size() && hypers.size() == act_step_counts.size() &&
              hypers.size() == train_step_counts.size() && hypers.size() == behavior_rng.size() &&
              hypers.size() == batch_rng.size(),
          "checkpoint: inconsistent pool vectors");
  std::vector<std::uint8_t> out;
  bytes::append_u64(out, kMagic);
  bytes::append_u64(out, run_seed);
  bytes::append_u64(out, env_steps);
  bytes::append_u64(out, episode_counter);
  bytes::append_u64(out, period_round);

  bytes::append_u64(out, hypers.size());
  for (std::size_t i = 0; i < hypers.size(); ++i) {
    append_hyper(out, hypers[i]);
    append_snapshot(out, weights[i]);
    bytes::append_u64(out, act_step_counts[i]);
    bytes::append_u64(out, train_step_counts[i]);
    bytes::append_string(out, behavior_rng[i]);
    bytes::append_string(out, batch_rng[i]);
  }

  bytes::append_u64(out, arms.size());
  for (const auto& a : arms) append_arm(out, a);
  bytes::append_u64(out, bandit_time);
  bytes::append_u64(out, bandit_mode == bandit::Mode::kSliding ? 1 : 0);
  bytes::append_u64(out, window_length);

  bytes::append_u64(out, buffer_capacity);
  bytes::append_u64(out, buffer_insert_count);
  bytes::append_string(out, bandit_rng);
  bytes::append_string(out, pbt_rng);
  return out;
}

Checkpoint Checkpoint::from_bytes(const std::vector<std::uint8_t>& buf) {
  bytes::Reader r(buf);
  require(r.read_u64() == kMagic, "checkpoint: bad magic");
  Checkpoint c;
  c.run_seed = r.read_u64();
  c.env_steps = r.read_u64();
  c.episode_counter = r.read_u64();
  c.period_round = r.read_u64();

  const auto k = r.read_u64();
  for (std::uint64_t i = 0; i < k; ++i) {
    c.hypers.push_back(read_hyper(r));
    c.weights.push_back(read_snapshot(r));
    c.act_step_counts.push_back(r.read_u64());
    c.train_step_counts.push_back(r.read_u64());
    c.behavior_rng.push_back(r.read_string());
    c.batch_rng.push_back(r.read_string());
  }

  const auto n_arms = r.read_u64();
  for (std::uint64_t i = 0; i < n_arms; ++i) c.arms.push_back(read_arm(r));
  c.bandit_time = r.read_u64();
  c.bandit_mode = r.read_u64() == 1 ? bandit::Mode::kSliding : bandit::Mode::kCumulative;
  c.window_length = r.read_u64();

  c.buffer_capacity = r.read_u64();
  c.buffer_insert_count = r.read_u64();
  c.bandit_rng = r.read_string();
  c.pbt_rng = r.read_string();
  require(r.done(), "checkpoint: trailing bytes");
  return c;
}

void save_checkpoint(const Checkpoint& c, const std::filesystem::path& path) {
  const auto buf = c.to_bytes();
  csv::write_file_atomic(path,
                         std::string(reinterpret_cast<const char*>(buf.data()), buf.size()));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  const auto text = csv::read_file(path);
  std::vector<std::uint8_t> buf(text.begin(), text.end());
  return Checkpoint::from_bytes(buf);
}

}  // namespace abps::checkpoint
