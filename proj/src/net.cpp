// SPDX-License-Identifier: Apache-2.0
#include "abps/net.hpp"

#include <cmath>

#include "abps/bytes.hpp"
#include "abps/error.hpp"
#include "abps/kernels.hpp"

namespace abps::net {

QNetwork::QNetwork(int input_size, const std::vector<int>& hidden_sizes,
                   int output_size)
    : input_size_(input_size), output_size_(output_size), hidden_sizes_(hidden_sizes) {
  require(input_size >= 1 && output_size >= 1, "net: sizes must be positive");
  int prev = input_size;
  for (int h : hidden_sizes) {
    require(h >= 1, "net: hidden sizes must be positive");
    layers_.push_back(Layer{h, prev, std::vector<double>(static_cast<std::size_t>(h) * static_cast<std::size_t>(prev), 0.0),
                            std::vector<double>(static_cast<std::size_t>(h), 0.0)});
    prev = h;
  }
  layers_.push_back(Layer{output_size, prev,
                          std::vector<double>(static_cast<std::size_t>(output_size) * static_cast<std::size_t>(prev), 0.0),
                          std::vector<double>(static_cast<std::size_t>(output_size), 0.0)});
}

bool QNetwork::same_shape(const QNetwork& other) const {
  return input_size_ == other.input_size_ && output_size_ == other.output_size_ &&
         hidden_sizes_ == other.hidden_sizes_;
}

std::size_t QNetwork::param_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += l.w.size() + l.b.size();
  return n;
}

void QNetwork::init_weights(RngStream& rng) {
  for (auto& l : layers_) {
    const double limit = std::sqrt(6.0 / static_cast<double>(l.rows + l.cols));
    for (auto& w : l.w) w = rng.uniform_range(-limit, limit);
    for (auto& b : l.b) b = 0.0;
  }
}

std::vector<double> QNetwork::forward(const std::vector<double>& x) const {
  require(static_cast<int>(x.size()) == input_size_,
          "net: observation length ", x.size(), " does not match input width ",
          input_size_);
  const auto& k = kernels::active();
  std::vector<double> cur = x, next;
  for (std::size_t li = 0; li < layers_.size(); ++li) {
    const auto& l = layers_[li];
    next.assign(static_cast<std::size_t>(l.rows), 0.0);
    k.matvec(next.data(), l.w.data(), cur.data(), l.b.data(),
             static_cast<std::size_t>(l.rows), static_cast<std::size_t>(l.cols));
    if (li + 1 < layers_.size()) k.relu(next.data(), next.size());
    cur.swap(next);
  }
  return cur;
}

std::vector<double> QNetwork::flat_params() const {
  std::vector<double> flat;
  flat.reserve(param_count());
  for (const auto& l : layers_) {
    flat.insert(flat.end(), l.w.begin(), l.w.end());
    flat.insert(flat.end(), l.b.begin(), l.b.end());
  }
  return flat;
}

void QNetwork::set_flat_params(const std::vector<double>& flat) {
  require(flat.size() == param_count(), "net: flat parameter size mismatch");
  std::size_t pos = 0;
  for (auto& l : layers_) {
    std::copy(flat.begin() + static_cast<std::ptrdiff_t>(pos),
              flat.begin() + static_cast<std::ptrdiff_t>(pos + l.w.size()), l.w.begin());
    pos += l.w.size();
    std::copy(flat.begin() + static_cast<std::ptrdiff_t>(pos),
              flat.begin() + static_cast<std::ptrdiff_t>(pos + l.b.size()), l.b.begin());
    pos += l.b.size();
  }
}

std::vector<std::uint8_t> WeightSnapshot::to_bytes() const {
  std::vector<std::uint8_t> out;
  bytes::append_u64(out, static_cast<std::uint64_t>(input_size));
  bytes::append_u64(out, static_cast<std::uint64_t>(output_size));
  bytes::append_u64(out, hidden_sizes.size());
  for (int h : hidden_sizes) bytes::append_u64(out, static_cast<std::uint64_t>(h));
  bytes::append_u64(out, online.size());
  for (double v : online) bytes::append_f64(out, v);
  bytes::append_u64(out, target.size());
  for (double v : target) bytes::append_f64(out, v);
  return out;
}

WeightSnapshot WeightSnapshot::from_bytes(const std::vector<std::uint8_t>& buf) {
  bytes::Reader r(buf);
  WeightSnapshot s;
  s.input_size = static_cast<int>(r.read_u64());
  s.output_size = static_cast<int>(r.read_u64());
  const std::uint64_t nh = r.read_u64();
  for (std::uint64_t i = 0; i < nh; ++i) s.hidden_sizes.push_back(static_cast<int>(r.read_u64()));
  const std::uint64_t no = r.read_u64();
  for (std::uint64_t i = 0; i < no; ++i) s.online.push_back(r.read_f64());
  const std::uint64_t nt = r.read_u64();
  for (std::uint64_t i = 0; i < nt; ++i) s.target.push_back(r.read_f64());
  require(r.done(), "weight snapshot: trailing bytes");
  return s;
}

}  // namespace abps::net
