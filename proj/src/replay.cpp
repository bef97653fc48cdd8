// SPDX-License-Identifier: Apache-2.0
#include "abps/replay.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "abps/error.hpp"

namespace abps::replay {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  require(capacity >= 1, "replay: capacity must be >= 1");
  storage_.reserve(std::min<std::size_t>(capacity, 4096));
}

std::size_t ReplayBuffer::size() const {
  return static_cast<std::size_t>(
      std::min<std::uint64_t>(insert_count_, capacity_));
}

void ReplayBuffer::push(Transition t) {
  require(std::isfinite(t.r), "replay: non-finite reward");
  if (storage_.size() < capacity_) {
    storage_.push_back(std::move(t));
  } else {
    storage_[static_cast<std::size_t>(insert_count_ % capacity_)] = std::move(t);
  }
  ++insert_count_;
}

const Transition& ReplayBuffer::at(std::size_t i) const {
  require(i < size(), "replay: index out of range");
  const std::size_t oldest =
      insert_count_ <= capacity_ ? 0 : static_cast<std::size_t>(insert_count_ % capacity_);
  return storage_[(oldest + i) % capacity_];
}

std::vector<const Transition*> ReplayBuffer::sample(std::size_t batch_size,
                                                    RngStream& rng) const {
  const std::size_t n = size();
  require(n >= 1, "replay: sample from empty buffer");
  std::vector<const Transition*> batch;
  batch.reserve(batch_size);
  for (std::size_t i = 0; i < batch_size; ++i) {
    batch.push_back(&storage_[static_cast<std::size_t>(rng.uniform_int(n))]);
  }
  return batch;
}

}  // namespace abps::replay
