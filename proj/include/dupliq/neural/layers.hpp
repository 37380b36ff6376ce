#pragma once

#include <cstdint>
#include <memory>
#include <nlohmann/json.hpp>
#include <string>
#include <string_view>
#include <vector>

#include "dupliq/neural/tensor.hpp"
#include "dupliq/rng.hpp"

namespace dupliq::neural {

/// train: dropout active, batch norm on batch statistics with running
/// updates. infer: deterministic, running statistics. check: like infer, so
/// that every layer is a fixed differentiable map for finite differences.
enum class Mode { train, infer, check };

enum class LayerKind {
  embedding,
  lstm,
  time_distributed_dense,
  lambda_sum,
  conv1d,
  global_max_pool,
  dense,
  batch_norm,
  prelu,
  dropout,
  sigmoid,
  concat,
};

std::string_view layer_kind_name(LayerKind kind);

enum class Activation { linear, relu };

struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;
  bool trainable = true;
};

/// A layer caches what its backward pass needs from the latest forward call.
class Layer {
 public:
  virtual ~Layer() = default;

  virtual LayerKind kind() const = 0;
  virtual Tensor forward(const Tensor& x, Mode mode, Rng& rng) = 0;
  /// Adds parameter gradients and returns the gradient of the input.
  virtual Tensor backward(const Tensor& dy) = 0;
  virtual std::vector<Parameter*> parameters() { return {}; }
  /// Output feature width for an input of the given per-example width.
  virtual std::size_t output_width(std::size_t input_width) const { return input_width; }
  virtual nlohmann::json config() const { return nlohmann::json::object(); }
};

using LayerPtr = std::unique_ptr<Layer>;

/// (B, T) token indices -> (B, T, dim). Index 0 is padding.
class Embedding final : public Layer {
 public:
  /// Uniform(-0.05, 0.05) initial rows.
  Embedding(std::size_t vocab_size, std::size_t dim, Rng& rng);
  /// Fixed rows (vocab_size x dim) that are excluded from training when frozen.
  Embedding(Tensor table, bool frozen);

  LayerKind kind() const override { return LayerKind::embedding; }
  Tensor forward(const Tensor& x, Mode mode, Rng& rng) override;
  Tensor backward(const Tensor& dy) override;
  std::vector<Parameter*> parameters() override { return {&table_}; }
  std::size_t output_width(std::size_t) const override { return dim_; }
  nlohmann::json config() const override;

 private:
  std::size_t vocab_;
  std::size_t dim_;
  Parameter table_;
  Tensor indices_;
};

/// (B, in) -> (B, out); also applied per step to (B, T, in).
class Dense final : public Layer {
 public:
  Dense(std::size_t in, std::size_t out, Activation activation, Rng& rng, bool time_distributed = false);

  LayerKind kind() const override {
    return time_distributed_ ? LayerKind::time_distributed_dense : LayerKind::dense;
  }
  Tensor forward(const Tensor& x, Mode mode, Rng& rng) override;
  Tensor backward(const Tensor& dy) override;
  std::vector<Parameter*> parameters() override { return {&weight_, &bias_}; }
  std::size_t output_width(std::size_t) const override { return out_; }
  nlohmann::json config() const override;

 private:
  std::size_t in_, out_;
  Activation activation_;
  bool time_distributed_;
  Parameter weight_;  // (in, out)
  Parameter bias_;    // (out)
  Tensor input_, output_;
};

/// (B, T, d) -> (B, units), last hidden state. Gate order i, f, g, o.
class Lstm final : public Layer {
 public:
  Lstm(std::size_t input_dim, std::size_t units, double recurrent_dropout, Rng& rng);

  LayerKind kind() const override { return LayerKind::lstm; }
  Tensor forward(const Tensor& x, Mode mode, Rng& rng) override;
  Tensor backward(const Tensor& dy) override;
  std::vector<Parameter*> parameters() override { return {&kernel_, &recurrent_, &bias_}; }
  std::size_t output_width(std::size_t) const override { return units_; }
  nlohmann::json config() const override;

 private:
  std::size_t dim_, units_;
  double recurrent_dropout_;
  Parameter kernel_;     // (d, 4u)
  Parameter recurrent_;  // (u, 4u)
  Parameter bias_;       // (4u)
  // Caches, per step t: gates (B, 4u) after activation, cells and hiddens.
  Tensor input_;
  std::vector<Tensor> gates_, cells_, hiddens_;
  Tensor mask_;  // (B, u), ones when inactive
};

/// (B, T, d) -> (B, T, filters), "same" padding, relu.
class Conv1D final : public Layer {
 public:
  Conv1D(std::size_t input_dim, std::size_t filters, std::size_t kernel, Rng& rng);

  LayerKind kind() const override { return LayerKind::conv1d; }
  Tensor forward(const Tensor& x, Mode mode, Rng& rng) override;
  Tensor backward(const Tensor& dy) override;
  std::vector<Parameter*> parameters() override { return {&weight_, &bias_}; }
  std::size_t output_width(std::size_t) const override { return filters_; }
  nlohmann::json config() const override;

 private:
  std::size_t dim_, filters_, kernel_;
  Parameter weight_;  // (kernel, d, filters)
  Parameter bias_;    // (filters)
  Tensor input_, output_;
};

/// (B, T, d) -> (B, d), sum over the time axis.
class LambdaSum final : public Layer {
 public:
  LayerKind kind() const override { return LayerKind::lambda_sum; }
  Tensor forward(const Tensor& x, Mode mode, Rng& rng) override;
  Tensor backward(const Tensor& dy) override;

 private:
  std::vector<std::size_t> shape_;
};

/// (B, T, d) -> (B, d); the gradient goes to the first maximum.
class GlobalMaxPool final : public Layer {
 public:
  LayerKind kind() const override { return LayerKind::global_max_pool; }
  Tensor forward(const Tensor& x, Mode mode, Rng& rng) override;
  Tensor backward(const Tensor& dy) override;

 private:
  std::vector<std::size_t> shape_;
  std::vector<std::size_t> argmax_;
};

/// (B, w). Scale and shift are trainable; running mean and variance are
/// stored as frozen parameters.
class BatchNorm final : public Layer {
 public:
  static constexpr double kEpsilon = 1e-5;
  static constexpr double kMomentum = 0.99;

  explicit BatchNorm(std::size_t width);

  LayerKind kind() const override { return LayerKind::batch_norm; }
  Tensor forward(const Tensor& x, Mode mode, Rng& rng) override;
  Tensor backward(const Tensor& dy) override;
  std::vector<Parameter*> parameters() override { return {&gamma_, &beta_, &running_mean_, &running_var_}; }

 private:
  std::size_t width_;
  Parameter gamma_, beta_, running_mean_, running_var_;
  bool batch_stats_ = false;
  Tensor normalized_;
  std::vector<double> inv_std_;
};

/// x if x > 0 else a * x, one learnable slope per unit.
class PRelu final : public Layer {
 public:
  explicit PRelu(std::size_t width);

  LayerKind kind() const override { return LayerKind::prelu; }
  Tensor forward(const Tensor& x, Mode mode, Rng& rng) override;
  Tensor backward(const Tensor& dy) override;
  std::vector<Parameter*> parameters() override { return {&alpha_}; }

 private:
  std::size_t width_;
  Parameter alpha_;
  Tensor input_;
};

/// Inverted dropout; identity outside train mode.
class Dropout final : public Layer {
 public:
  explicit Dropout(double rate);

  LayerKind kind() const override { return LayerKind::dropout; }
  Tensor forward(const Tensor& x, Mode mode, Rng& rng) override;
  Tensor backward(const Tensor& dy) override;
  nlohmann::json config() const override { return {{"rate", rate_}}; }
  double rate() const { return rate_; }

 private:
  double rate_;
  Tensor mask_;
};

class Sigmoid final : public Layer {
 public:
  LayerKind kind() const override { return LayerKind::sigmoid; }
  Tensor forward(const Tensor& x, Mode mode, Rng& rng) override;
  Tensor backward(const Tensor& dy) override;

 private:
  Tensor output_;
};

double sigmoid(double z);

}  // namespace dupliq::neural
