// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "abps/rng.hpp"

namespace abps::net {

/// Fully-connected Q-network: relu on hidden layers, identity output.
/// All dense math goes through the kernels module, so results are identical
/// across backends.
class QNetwork {
 public:
  struct Layer {
    int rows = 0, cols = 0;
    std::vector<double> w;  // row-major rows x cols
    std::vector<double> b;  // rows
  };

  QNetwork() = default;
  QNetwork(int input_size, const std::vector<int>& hidden_sizes, int output_size);

  int input_size() const { return input_size_; }
  int output_size() const { return output_size_; }
  const std::vector<int>& hidden_sizes() const { return hidden_sizes_; }
  bool same_shape(const QNetwork& other) const;

  std::vector<Layer>& layers() { return layers_; }
  const std::vector<Layer>& layers() const { return layers_; }
  std::size_t param_count() const;

  /// Glorot-uniform weights, zero biases.
  void init_weights(RngStream& rng);

  std::vector<double> forward(const std::vector<double>& x) const;

  /// Flattened parameters, layer by layer, w then b.
  std::vector<double> flat_params() const;
  void set_flat_params(const std::vector<double>& flat);

 private:
  int input_size_ = 0;
  int output_size_ = 0;
  std::vector<int> hidden_sizes_;
  std::vector<Layer> layers_;
};

/// Value-semantic copy of a learner's weights (online + target) plus the
/// architecture needed to validate a load.
struct WeightSnapshot {
  int input_size = 0;
  int output_size = 0;
  std::vector<int> hidden_sizes;
  std::vector<double> online;
  std::vector<double> target;

  std::vector<std::uint8_t> to_bytes() const;
  static WeightSnapshot from_bytes(const std::vector<std::uint8_t>& buf);
};

}  // namespace abps::net
