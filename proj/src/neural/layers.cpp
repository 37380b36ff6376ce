#include "dupliq/neural/layers.hpp"

#include <algorithm>
#include <cmath>

#include "dupliq/common.hpp"

namespace dupliq::neural {

std::string_view layer_kind_name(LayerKind kind) {
  switch (kind) {
    case LayerKind::embedding: return "embedding";
    case LayerKind::lstm: return "lstm";
    case LayerKind::time_distributed_dense: return "time_distributed_dense";
    case LayerKind::lambda_sum: return "lambda_sum";
    case LayerKind::conv1d: return "conv1d";
    case LayerKind::global_max_pool: return "global_max_pool";
    case LayerKind::dense: return "dense";
    case LayerKind::batch_norm: return "batch_norm";
    case LayerKind::prelu: return "prelu";
    case LayerKind::dropout: return "dropout";
    case LayerKind::sigmoid: return "sigmoid";
    case LayerKind::concat: return "concat";
  }
  return "unknown";
}

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

namespace {

Parameter make_param(std::string name, std::vector<std::size_t> shape, bool trainable = true) {
  Parameter p{std::move(name), Tensor(shape), Tensor(shape), trainable};
  return p;
}

void require_rank(const Tensor& x, std::size_t rank, std::string_view layer) {
  if (x.rank() != rank) {
    throw ContractError(std::string(layer) + " expects a rank-" + std::to_string(rank) + " input, got " +
                        shape_string(x.shape));
  }
}

void require_width(const Tensor& x, std::size_t width, std::string_view layer) {
  if (x.shape.back() != width) {
    throw ContractError(std::string(layer) + " expects width " + std::to_string(width) + ", got " +
                        shape_string(x.shape));
  }
}

}  // namespace

// Embedding

Embedding::Embedding(std::size_t vocab_size, std::size_t dim, Rng& rng)
    : vocab_(vocab_size), dim_(dim), table_(make_param("embeddings", {vocab_size, dim})) {
  for (double& v : table_.value.data) v = rng.uniform(-0.05, 0.05);
}

Embedding::Embedding(Tensor table, bool frozen)
    : vocab_(table.rank() == 2 ? table.dim(0) : 0), dim_(table.rank() == 2 ? table.dim(1) : 0) {
  if (table.rank() != 2) throw ContractError("embedding table must be (vocab, dim)");
  table_ = make_param("embeddings", table.shape, !frozen);
  table_.value = std::move(table);
}

nlohmann::json Embedding::config() const {
  return {{"vocab_size", vocab_}, {"dim", dim_}, {"frozen", !table_.trainable}};
}

Tensor Embedding::forward(const Tensor& x, Mode, Rng&) {
  require_rank(x, 2, "embedding");
  Tensor out({x.dim(0), x.dim(1), dim_});
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double raw = x[i];
    if (!(raw >= 0) || raw != std::floor(raw) || raw >= static_cast<double>(vocab_)) {
      throw ContractError("token index " + format_double(raw) + " outside vocabulary of " + std::to_string(vocab_));
    }
    const auto row = static_cast<std::size_t>(raw);
    std::copy_n(table_.value.data.begin() + static_cast<std::ptrdiff_t>(row * dim_), dim_,
                out.data.begin() + static_cast<std::ptrdiff_t>(i * dim_));
  }
  indices_ = x;
  return out;
}

Tensor Embedding::backward(const Tensor& dy) {
  if (table_.trainable) {
    for (std::size_t i = 0; i < indices_.size(); ++i) {
      const auto row = static_cast<std::size_t>(indices_[i]);
      for (std::size_t k = 0; k < dim_; ++k) table_.grad[row * dim_ + k] += dy[i * dim_ + k];
    }
  }
  return {};
}

// Dense

Dense::Dense(std::size_t in, std::size_t out, Activation activation, Rng& rng, bool time_distributed)
    : in_(in),
      out_(out),
      activation_(activation),
      time_distributed_(time_distributed),
      weight_(make_param("kernel", {in, out})),
      bias_(make_param("bias", {out})) {
  const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
  for (double& v : weight_.value.data) v = rng.uniform(-limit, limit);
}

nlohmann::json Dense::config() const {
  return {{"in", in_}, {"out", out_}, {"activation", activation_ == Activation::relu ? "relu" : "linear"}};
}

Tensor Dense::forward(const Tensor& x, Mode, Rng&) {
  require_rank(x, time_distributed_ ? 3 : 2, layer_kind_name(kind()));
  require_width(x, in_, layer_kind_name(kind()));
  std::vector<std::size_t> shape = x.shape;
  shape.back() = out_;
  Tensor y(shape);
  const std::size_t rows = x.size() / in_;
  const auto& w = weight_.value.data;
  for (std::size_t r = 0; r < rows; ++r) {
    double* yr = y.data.data() + r * out_;
    std::copy(bias_.value.data.begin(), bias_.value.data.end(), yr);
    const double* xr = x.data.data() + r * in_;
    for (std::size_t i = 0; i < in_; ++i) {
      const double xi = xr[i];
      if (xi == 0.0) continue;
      const double* wi = w.data() + i * out_;
      for (std::size_t o = 0; o < out_; ++o) yr[o] += xi * wi[o];
    }
    if (activation_ == Activation::relu) {
      for (std::size_t o = 0; o < out_; ++o) yr[o] = std::max(0.0, yr[o]);
    }
  }
  input_ = x;
  output_ = y;
  return y;
}

Tensor Dense::backward(const Tensor& dy_in) {
  Tensor dy = dy_in;
  if (activation_ == Activation::relu) {
    for (std::size_t i = 0; i < dy.size(); ++i) {
      if (output_[i] <= 0.0) dy[i] = 0.0;
    }
  }
  Tensor dx(input_.shape);
  const std::size_t rows = input_.size() / in_;
  const auto& w = weight_.value.data;
  auto& gw = weight_.grad.data;
  auto& gb = bias_.grad.data;
  for (std::size_t r = 0; r < rows; ++r) {
    const double* dyr = dy.data.data() + r * out_;
    const double* xr = input_.data.data() + r * in_;
    double* dxr = dx.data.data() + r * in_;
    for (std::size_t o = 0; o < out_; ++o) gb[o] += dyr[o];
    for (std::size_t i = 0; i < in_; ++i) {
      const double* wi = w.data() + i * out_;
      double* gwi = gw.data() + i * out_;
      double acc = 0;
      for (std::size_t o = 0; o < out_; ++o) {
        gwi[o] += xr[i] * dyr[o];
        acc += wi[o] * dyr[o];
      }
      dxr[i] = acc;
    }
  }
  return dx;
}

// LambdaSum

Tensor LambdaSum::forward(const Tensor& x, Mode, Rng&) {
  require_rank(x, 3, "lambda_sum");
  const std::size_t b = x.dim(0), t = x.dim(1), d = x.dim(2);
  Tensor y({b, d});
  for (std::size_t i = 0; i < b; ++i) {
    for (std::size_t s = 0; s < t; ++s) {
      for (std::size_t k = 0; k < d; ++k) y[i * d + k] += x[(i * t + s) * d + k];
    }
  }
  shape_ = x.shape;
  return y;
}

Tensor LambdaSum::backward(const Tensor& dy) {
  const std::size_t b = shape_[0], t = shape_[1], d = shape_[2];
  Tensor dx(shape_);
  for (std::size_t i = 0; i < b; ++i) {
    for (std::size_t s = 0; s < t; ++s) {
      std::copy_n(dy.data.begin() + static_cast<std::ptrdiff_t>(i * d), d,
                  dx.data.begin() + static_cast<std::ptrdiff_t>((i * t + s) * d));
    }
  }
  return dx;
}

// GlobalMaxPool

Tensor GlobalMaxPool::forward(const Tensor& x, Mode, Rng&) {
  require_rank(x, 3, "global_max_pool");
  const std::size_t b = x.dim(0), t = x.dim(1), d = x.dim(2);
  if (t == 0) throw ContractError("global_max_pool over an empty sequence");
  Tensor y({b, d});
  argmax_.assign(b * d, 0);
  for (std::size_t i = 0; i < b; ++i) {
    for (std::size_t k = 0; k < d; ++k) {
      std::size_t best = 0;
      for (std::size_t s = 1; s < t; ++s) {
        if (x[(i * t + s) * d + k] > x[(i * t + best) * d + k]) best = s;
      }
      argmax_[i * d + k] = best;
      y[i * d + k] = x[(i * t + best) * d + k];
    }
  }
  shape_ = x.shape;
  return y;
}

Tensor GlobalMaxPool::backward(const Tensor& dy) {
  const std::size_t b = shape_[0], t = shape_[1], d = shape_[2];
  Tensor dx(shape_);
  for (std::size_t i = 0; i < b; ++i) {
    for (std::size_t k = 0; k < d; ++k) dx[(i * t + argmax_[i * d + k]) * d + k] = dy[i * d + k];
  }
  return dx;
}

// BatchNorm

BatchNorm::BatchNorm(std::size_t width)
    : width_(width),
      gamma_(make_param("gamma", {width})),
      beta_(make_param("beta", {width})),
      running_mean_(make_param("running_mean", {width}, false)),
      running_var_(make_param("running_variance", {width}, false)) {
  std::fill(gamma_.value.data.begin(), gamma_.value.data.end(), 1.0);
  std::fill(running_var_.value.data.begin(), running_var_.value.data.end(), 1.0);
}

Tensor BatchNorm::forward(const Tensor& x, Mode mode, Rng&) {
  require_rank(x, 2, "batch_norm");
  require_width(x, width_, "batch_norm");
  const std::size_t b = x.dim(0);
  batch_stats_ = mode == Mode::train;
  std::vector<double> mean(width_, 0.0), var(width_, 0.0);
  if (batch_stats_) {
    if (b == 0) throw ContractError("batch_norm needs a non-empty batch");
    for (std::size_t i = 0; i < b; ++i) {
      for (std::size_t k = 0; k < width_; ++k) mean[k] += x[i * width_ + k];
    }
    for (double& m : mean) m /= static_cast<double>(b);
    for (std::size_t i = 0; i < b; ++i) {
      for (std::size_t k = 0; k < width_; ++k) {
        const double d = x[i * width_ + k] - mean[k];
        var[k] += d * d;
      }
    }
    for (double& v : var) v /= static_cast<double>(b);
    if (mode == Mode::train) {
      for (std::size_t k = 0; k < width_; ++k) {
        running_mean_.value[k] = kMomentum * running_mean_.value[k] + (1 - kMomentum) * mean[k];
        running_var_.value[k] = kMomentum * running_var_.value[k] + (1 - kMomentum) * var[k];
      }
    }
  } else {
    mean = running_mean_.value.data;
    var = running_var_.value.data;
  }
  inv_std_.resize(width_);
  for (std::size_t k = 0; k < width_; ++k) inv_std_[k] = 1.0 / std::sqrt(var[k] + kEpsilon);
  normalized_ = Tensor(x.shape);
  Tensor y(x.shape);
  for (std::size_t i = 0; i < b; ++i) {
    for (std::size_t k = 0; k < width_; ++k) {
      const double n = (x[i * width_ + k] - mean[k]) * inv_std_[k];
      normalized_[i * width_ + k] = n;
      y[i * width_ + k] = gamma_.value[k] * n + beta_.value[k];
    }
  }
  return y;
}

Tensor BatchNorm::backward(const Tensor& dy) {
  const std::size_t b = normalized_.dim(0);
  Tensor dx(normalized_.shape);
  for (std::size_t k = 0; k < width_; ++k) {
    double sum_dy = 0, sum_dy_n = 0;
    for (std::size_t i = 0; i < b; ++i) {
      sum_dy += dy[i * width_ + k];
      sum_dy_n += dy[i * width_ + k] * normalized_[i * width_ + k];
    }
    gamma_.grad[k] += sum_dy_n;
    beta_.grad[k] += sum_dy;
    const double scale = gamma_.value[k] * inv_std_[k];
    for (std::size_t i = 0; i < b; ++i) {
      const double g = dy[i * width_ + k];
      if (batch_stats_) {
        const double bn = static_cast<double>(b);
        dx[i * width_ + k] = scale * (g - sum_dy / bn - normalized_[i * width_ + k] * sum_dy_n / bn);
      } else {
        dx[i * width_ + k] = scale * g;
      }
    }
  }
  return dx;
}

// PRelu

PRelu::PRelu(std::size_t width) : width_(width), alpha_(make_param("alpha", {width})) {
  std::fill(alpha_.value.data.begin(), alpha_.value.data.end(), 0.25);
}

Tensor PRelu::forward(const Tensor& x, Mode, Rng&) {
  require_rank(x, 2, "prelu");
  require_width(x, width_, "prelu");
  Tensor y(x.shape);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double v = x[i];
    y[i] = v > 0 ? v : alpha_.value[i % width_] * v;
  }
  input_ = x;
  return y;
}

Tensor PRelu::backward(const Tensor& dy) {
  Tensor dx(input_.shape);
  for (std::size_t i = 0; i < input_.size(); ++i) {
    const double v = input_[i];
    const std::size_t k = i % width_;
    if (v > 0) {
      dx[i] = dy[i];
    } else {
      dx[i] = alpha_.value[k] * dy[i];
      alpha_.grad[k] += v * dy[i];
    }
  }
  return dx;
}

// Dropout

Dropout::Dropout(double rate) : rate_(rate) {
  if (!(rate >= 0.0 && rate < 1.0)) throw ContractError("dropout rate must lie in [0, 1)");
}

Tensor Dropout::forward(const Tensor& x, Mode mode, Rng& rng) {
  if (mode != Mode::train || rate_ == 0.0) {
    mask_ = Tensor();
    return x;
  }
  mask_ = Tensor(x.shape);
  const double keep = 1.0 / (1.0 - rate_);
  Tensor y(x.shape);
  for (std::size_t i = 0; i < x.size(); ++i) {
    mask_[i] = rng.uniform() < rate_ ? 0.0 : keep;
    y[i] = x[i] * mask_[i];
  }
  return y;
}

Tensor Dropout::backward(const Tensor& dy) {
  if (mask_.size() == 0) return dy;
  Tensor dx(dy.shape);
  for (std::size_t i = 0; i < dy.size(); ++i) dx[i] = dy[i] * mask_[i];
  return dx;
}

// Sigmoid

Tensor Sigmoid::forward(const Tensor& x, Mode, Rng&) {
  Tensor y(x.shape);
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = sigmoid(x[i]);
  output_ = y;
  return y;
}

Tensor Sigmoid::backward(const Tensor& dy) {
  Tensor dx(dy.shape);
  for (std::size_t i = 0; i < dy.size(); ++i) dx[i] = dy[i] * output_[i] * (1 - output_[i]);
  return dx;
}

}  // namespace dupliq::neural
