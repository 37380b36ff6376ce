#include <cmath>

#include "dupliq/common.hpp"
#include "dupliq/neural/layers.hpp"

namespace dupliq::neural {

Lstm::Lstm(std::size_t input_dim, std::size_t units, double recurrent_dropout, Rng& rng)
    : dim_(input_dim), units_(units), recurrent_dropout_(recurrent_dropout) {
  if (!(recurrent_dropout >= 0.0 && recurrent_dropout < 1.0)) {
    throw ContractError("recurrent dropout must lie in [0, 1)");
  }
  kernel_ = {"kernel", Tensor({dim_, 4 * units_}), Tensor({dim_, 4 * units_}), true};
  recurrent_ = {"recurrent_kernel", Tensor({units_, 4 * units_}), Tensor({units_, 4 * units_}), true};
  bias_ = {"bias", Tensor({4 * units_}), Tensor({4 * units_}), true};
  const double kl = std::sqrt(6.0 / static_cast<double>(dim_ + 4 * units_));
  for (double& v : kernel_.value.data) v = rng.uniform(-kl, kl);
  const double rl = std::sqrt(6.0 / static_cast<double>(5 * units_));
  for (double& v : recurrent_.value.data) v = rng.uniform(-rl, rl);
  for (std::size_t k = units_; k < 2 * units_; ++k) bias_.value[k] = 1.0;
}

nlohmann::json Lstm::config() const {
  return {{"input_dim", dim_}, {"units", units_}, {"recurrent_dropout", recurrent_dropout_}};
}

namespace {

// out[b, :] += a[b, :] * w for a (B, n) and w (n, m).
void matmul_add(const double* a, std::size_t batch, std::size_t n, const std::vector<double>& w, std::size_t m,
                double* out) {
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t i = 0; i < n; ++i) {
      const double v = a[b * n + i];
      if (v == 0.0) continue;
      const double* wi = w.data() + i * m;
      double* o = out + b * m;
      for (std::size_t j = 0; j < m; ++j) o[j] += v * wi[j];
    }
  }
}

}  // namespace

Tensor Lstm::forward(const Tensor& x, Mode mode, Rng& rng) {
  if (x.rank() != 3 || x.dim(2) != dim_) {
    throw ContractError("lstm expects (batch, steps, " + std::to_string(dim_) + "), got " + shape_string(x.shape));
  }
  const std::size_t batch = x.dim(0), steps = x.dim(1), u = units_, g4 = 4 * units_;
  mask_ = Tensor({batch, u}, 1.0);
  if (mode == Mode::train && recurrent_dropout_ > 0) {
    const double keep = 1.0 / (1.0 - recurrent_dropout_);
    for (double& m : mask_.data) m = rng.uniform() < recurrent_dropout_ ? 0.0 : keep;
  }
  input_ = x;
  gates_.assign(steps, Tensor());
  cells_.assign(steps + 1, Tensor({batch, u}));
  hiddens_.assign(steps + 1, Tensor({batch, u}));

  std::vector<double> xt(batch * dim_), hm(batch * u);
  for (std::size_t t = 0; t < steps; ++t) {
    for (std::size_t b = 0; b < batch; ++b) {
      std::copy_n(x.data.begin() + static_cast<std::ptrdiff_t>((b * steps + t) * dim_), dim_,
                  xt.begin() + static_cast<std::ptrdiff_t>(b * dim_));
    }
    for (std::size_t k = 0; k < batch * u; ++k) hm[k] = hiddens_[t][k] * mask_[k];
    Tensor z({batch, g4});
    for (std::size_t b = 0; b < batch; ++b) {
      std::copy(bias_.value.data.begin(), bias_.value.data.end(), z.data.begin() + static_cast<std::ptrdiff_t>(b * g4));
    }
    matmul_add(xt.data(), batch, dim_, kernel_.value.data, g4, z.data.data());
    matmul_add(hm.data(), batch, u, recurrent_.value.data, g4, z.data.data());
    for (std::size_t b = 0; b < batch; ++b) {
      double* zb = z.data.data() + b * g4;
      for (std::size_t k = 0; k < u; ++k) {
        const double i = sigmoid(zb[k]);
        const double f = sigmoid(zb[u + k]);
        const double g = std::tanh(zb[2 * u + k]);
        const double o = sigmoid(zb[3 * u + k]);
        zb[k] = i;
        zb[u + k] = f;
        zb[2 * u + k] = g;
        zb[3 * u + k] = o;
        const double c = f * cells_[t][b * u + k] + i * g;
        cells_[t + 1][b * u + k] = c;
        hiddens_[t + 1][b * u + k] = o * std::tanh(c);
      }
    }
    gates_[t] = std::move(z);
  }
  return hiddens_[steps];
}

Tensor Lstm::backward(const Tensor& dy) {
  const std::size_t batch = input_.dim(0), steps = input_.dim(1), u = units_, g4 = 4 * units_;
  Tensor dx(input_.shape);
  std::vector<double> dh(dy.data), dc(batch * u, 0.0), dz(batch * g4), hm(batch * u);
  auto& gk = kernel_.grad.data;
  auto& gr = recurrent_.grad.data;
  auto& gb = bias_.grad.data;
  const auto& wk = kernel_.value.data;
  const auto& wr = recurrent_.value.data;

  for (std::size_t t = steps; t-- > 0;) {
    const Tensor& gate = gates_[t];
    for (std::size_t b = 0; b < batch; ++b) {
      for (std::size_t k = 0; k < u; ++k) {
        const std::size_t bu = b * u + k;
        const double* gb4 = gate.data.data() + b * g4;
        const double i = gb4[k], f = gb4[u + k], g = gb4[2 * u + k], o = gb4[3 * u + k];
        const double tc = std::tanh(cells_[t + 1][bu]);
        const double d_o = dh[bu] * tc;
        dc[bu] += dh[bu] * o * (1 - tc * tc);
        const double di = dc[bu] * g;
        const double dg = dc[bu] * i;
        const double df = dc[bu] * cells_[t][bu];
        dc[bu] *= f;
        double* dzb = dz.data() + b * g4;
        dzb[k] = di * i * (1 - i);
        dzb[u + k] = df * f * (1 - f);
        dzb[2 * u + k] = dg * (1 - g * g);
        dzb[3 * u + k] = d_o * o * (1 - o);
      }
    }
    for (std::size_t k = 0; k < batch * u; ++k) hm[k] = hiddens_[t][k] * mask_[k];
    for (std::size_t b = 0; b < batch; ++b) {
      const double* dzb = dz.data() + b * g4;
      for (std::size_t j = 0; j < g4; ++j) gb[j] += dzb[j];
      const double* xb = input_.data.data() + (b * steps + t) * dim_;
      double* dxb = dx.data.data() + (b * steps + t) * dim_;
      for (std::size_t i = 0; i < dim_; ++i) {
        const double* w = wk.data() + i * g4;
        double* gw = gk.data() + i * g4;
        double acc = 0;
        for (std::size_t j = 0; j < g4; ++j) {
          gw[j] += xb[i] * dzb[j];
          acc += w[j] * dzb[j];
        }
        dxb[i] = acc;
      }
      for (std::size_t i = 0; i < u; ++i) {
        const double* w = wr.data() + i * g4;
        double* gw = gr.data() + i * g4;
        const double h = hm[b * u + i];
        double acc = 0;
        for (std::size_t j = 0; j < g4; ++j) {
          gw[j] += h * dzb[j];
          acc += w[j] * dzb[j];
        }
        dh[b * u + i] = acc * mask_[b * u + i];
      }
    }
  }
  return dx;
}

}  // namespace dupliq::neural
