#include <algorithm>
#include <cmath>

#include "dupliq/common.hpp"
#include "dupliq/neural/layers.hpp"

namespace dupliq::neural {

Conv1D::Conv1D(std::size_t input_dim, std::size_t filters, std::size_t kernel, Rng& rng)
    : dim_(input_dim), filters_(filters), kernel_(kernel) {
  if (kernel == 0) throw ContractError("conv1d kernel width must be positive");
  weight_ = {"kernel", Tensor({kernel, dim_, filters}), Tensor({kernel, dim_, filters}), true};
  bias_ = {"bias", Tensor({filters}), Tensor({filters}), true};
  const double limit = std::sqrt(6.0 / static_cast<double>(kernel * (dim_ + filters)));
  for (double& v : weight_.value.data) v = rng.uniform(-limit, limit);
}

nlohmann::json Conv1D::config() const {
  return {{"input_dim", dim_}, {"filters", filters_}, {"kernel", kernel_}, {"padding", "same"},
          {"activation", "relu"}};
}

Tensor Conv1D::forward(const Tensor& x, Mode, Rng&) {
  if (x.rank() != 3 || x.dim(2) != dim_) {
    throw ContractError("conv1d expects (batch, steps, " + std::to_string(dim_) + "), got " + shape_string(x.shape));
  }
  const std::size_t batch = x.dim(0), steps = x.dim(1);
  const auto pad = static_cast<std::ptrdiff_t>((kernel_ - 1) / 2);
  Tensor y({batch, steps, filters_});
  const auto& w = weight_.value.data;
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t t = 0; t < steps; ++t) {
      double* yt = y.data.data() + (b * steps + t) * filters_;
      std::copy(bias_.value.data.begin(), bias_.value.data.end(), yt);
      for (std::size_t j = 0; j < kernel_; ++j) {
        const std::ptrdiff_t s = static_cast<std::ptrdiff_t>(t + j) - pad;
        if (s < 0 || s >= static_cast<std::ptrdiff_t>(steps)) continue;
        const double* xs = x.data.data() + (b * steps + static_cast<std::size_t>(s)) * dim_;
        for (std::size_t c = 0; c < dim_; ++c) {
          const double* wc = w.data() + (j * dim_ + c) * filters_;
          for (std::size_t f = 0; f < filters_; ++f) yt[f] += xs[c] * wc[f];
        }
      }
      for (std::size_t f = 0; f < filters_; ++f) yt[f] = std::max(0.0, yt[f]);
    }
  }
  input_ = x;
  output_ = y;
  return y;
}

Tensor Conv1D::backward(const Tensor& dy) {
  const std::size_t batch = input_.dim(0), steps = input_.dim(1);
  const auto pad = static_cast<std::ptrdiff_t>((kernel_ - 1) / 2);
  Tensor dx(input_.shape);
  const auto& w = weight_.value.data;
  auto& gw = weight_.grad.data;
  std::vector<double> dz(filters_);
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t t = 0; t < steps; ++t) {
      const std::size_t base = (b * steps + t) * filters_;
      for (std::size_t f = 0; f < filters_; ++f) {
        dz[f] = output_[base + f] > 0 ? dy[base + f] : 0.0;
        bias_.grad[f] += dz[f];
      }
      for (std::size_t j = 0; j < kernel_; ++j) {
        const std::ptrdiff_t s = static_cast<std::ptrdiff_t>(t + j) - pad;
        if (s < 0 || s >= static_cast<std::ptrdiff_t>(steps)) continue;
        const std::size_t xoff = (b * steps + static_cast<std::size_t>(s)) * dim_;
        for (std::size_t c = 0; c < dim_; ++c) {
          const double* wc = w.data() + (j * dim_ + c) * filters_;
          double* gwc = gw.data() + (j * dim_ + c) * filters_;
          const double xv = input_[xoff + c];
          double acc = 0;
          for (std::size_t f = 0; f < filters_; ++f) {
            gwc[f] += xv * dz[f];
            acc += wc[f] * dz[f];
          }
          dx[xoff + c] += acc;
        }
      }
    }
  }
  return dx;
}

}  // namespace dupliq::neural
