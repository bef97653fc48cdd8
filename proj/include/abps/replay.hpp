// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "abps/env.hpp"
#include "abps/rng.hpp"

namespace abps::replay {

struct Transition {
  env::Observation s;
  int a = 0;
  double r = 0.0;
  env::Observation s_next;
  bool done = false;
};

/// Shared FIFO ring buffer every learner in the pool trains from.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  std::size_t capacity() const { return capacity_; }
  std::size_t size() const;
  std::uint64_t insert_count() const { return insert_count_; }

  void push(Transition t);

  /// i-th oldest retained transition (insertion order).
  const Transition& at(std::size_t i) const;

  /// batch_size transitions drawn uniformly with replacement. Pointers stay
  /// valid until the next push; sampling never mutates the buffer.
  std::vector<const Transition*> sample(std::size_t batch_size, RngStream& rng) const;

 private:
  std::size_t capacity_;
  std::uint64_t insert_count_ = 0;
  std::vector<Transition> storage_;
};

}  // namespace abps::replay
