#pragma once

#include <cstdint>
#include <nlohmann/json.hpp>
#include <span>
#include <vector>

#include "dupliq/neural/layers.hpp"

namespace dupliq::neural {

/// A layer stack fed by one of the network inputs.
struct Branch {
  std::size_t input = 0;
  std::vector<LayerPtr> layers;
};

/// Branches -> concatenation -> head. The head ends in Dense(width 1) and
/// Sigmoid.
class Network {
 public:
  Network(std::vector<Branch> branches, std::vector<LayerPtr> head, std::size_t input_count,
          std::size_t sequence_length, std::uint64_t seed);

  std::size_t input_count() const { return inputs_; }
  std::size_t branch_count() const { return branches_.size(); }
  std::size_t sequence_length() const { return seq_len_; }
  /// Width of the concatenated branch outputs.
  std::size_t merge_width() const { return merge_width_; }

  /// Pre-sigmoid scores, shape (B, 1). Each input is (B, sequence_length).
  Tensor logits(std::span<const Tensor> inputs, Mode mode);
  /// Probabilities per example.
  std::vector<double> forward(std::span<const Tensor> inputs, Mode mode);
  /// Back-propagates d(loss)/d(logits) from the latest logits() call.
  void backward(const Tensor& dlogits);

  std::vector<Parameter*> parameters();
  void zero_grad();
  std::size_t parameter_count() const;
  std::size_t trainable_parameter_count() const;

  /// Layer listing with per-layer parameter counts.
  nlohmann::json describe() const;
  Rng& rng() { return rng_; }

 private:
  std::vector<Branch> branches_;
  std::vector<LayerPtr> head_;  // without the trailing sigmoid
  std::size_t inputs_;
  std::size_t seq_len_;
  std::size_t merge_width_ = 0;
  std::vector<std::size_t> branch_widths_;
  Rng rng_;
};

/// Mean (or summed) binary cross-entropy computed from logits, stable for
/// large magnitudes.
double bce_from_logits(std::span<const double> logits, std::span<const int> labels, bool sum = false);

}  // namespace dupliq::neural
