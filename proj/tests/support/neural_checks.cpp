#include "neural_checks.hpp"

#include <algorithm>
#include <cmath>

namespace nncheck {

using namespace dupliq::neural;

Tensor random_tensor(std::vector<std::size_t> shape, dupliq::Rng& rng, double scale) {
  Tensor t(std::move(shape));
  for (double& v : t.data) v = rng.normal() * scale;
  return t;
}

Tensor random_indices(std::size_t batch, std::size_t steps, std::size_t vocab, dupliq::Rng& rng) {
  Tensor x({batch, steps});
  for (double& v : x.data) v = static_cast<double>(rng.below(vocab));
  return x;
}

namespace {

constexpr std::uint64_t kForwardSeed = 99;

double probe(Layer& layer, const Tensor& x, Mode mode, const Tensor& w) {
  dupliq::Rng rng(kForwardSeed);
  const Tensor y = layer.forward(x, mode, rng);
  double s = 0;
  for (std::size_t i = 0; i < y.size(); ++i) s += y[i] * w[i];
  return s;
}

double rel_error(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-4}); }

std::size_t lstm_params(std::size_t d, std::size_t u) { return 4 * u * (d + u + 1); }
std::size_t dense_params(std::size_t in, std::size_t out) { return in * out + out; }

}  // namespace

double layer_gradcheck(Layer& layer, Tensor x, Mode mode, bool input_is_indices) {
  dupliq::Rng wrng(5);
  dupliq::Rng frng(kForwardSeed);
  const Tensor w = random_tensor(layer.forward(x, mode, frng).shape, wrng);
  for (Parameter* p : layer.parameters()) std::fill(p->grad.data.begin(), p->grad.data.end(), 0.0);
  probe(layer, x, mode, w);
  const Tensor dx = layer.backward(w);

  const double h = 1e-6;
  double worst = 0;
  const auto central = [&](double& slot) {
    const double keep = slot;
    slot = keep + h;
    const double up = probe(layer, x, mode, w);
    slot = keep - h;
    const double down = probe(layer, x, mode, w);
    slot = keep;
    return (up - down) / (2 * h);
  };
  if (!input_is_indices) {
    for (std::size_t i = 0; i < x.size(); ++i) worst = std::max(worst, rel_error(dx[i], central(x.data[i])));
  }
  for (Parameter* p : layer.parameters()) {
    if (!p->trainable) continue;
    for (std::size_t i = 0; i < p->value.size(); ++i) {
      worst = std::max(worst, rel_error(p->grad[i], central(p->value.data[i])));
    }
  }
  return worst;
}

std::size_t expected_parameters(int id, std::size_t vocab, std::size_t glove, const ArchDims& d) {
  const std::size_t u = d.units, f = d.conv_filters, k = d.conv_kernel;
  std::size_t n = 2 * (vocab * d.embed_dim + lstm_params(d.embed_dim, u));
  std::size_t branches = 2;
  if (id >= 2) {
    n += 2 * (vocab * glove + dense_params(glove, u));
    branches += 2;
  }
  if (id == 4) {
    n += 2 * (vocab * glove + (k * glove * f + f) + (k * f * f + f) + 4 * f + dense_params(f, u));
    branches += 2;
  }
  std::size_t width = branches * u;
  n += 4 * width;
  for (int b = 0; b < head_blocks_for(id, d); ++b) {
    n += dense_params(width, u) + (id == 4 ? 0 : u) + 4 * u;
    width = u;
  }
  return n + dense_params(width, 1);
}

std::size_t expected_trainable(int id, std::size_t vocab, std::size_t glove, const ArchDims& d) {
  const std::size_t branches = id == 4 ? 6 : id >= 2 ? 4 : 2;
  std::size_t frozen = 0;
  if (id >= 2) frozen += 2 * vocab * glove;
  if (id == 4) frozen += 2 * vocab * glove;
  std::size_t bn_width = branches * d.units + static_cast<std::size_t>(head_blocks_for(id, d)) * d.units;
  if (id == 4) bn_width += 2 * d.conv_filters;
  return expected_parameters(id, vocab, glove, d) - frozen - 2 * bn_width;
}

}  // namespace nncheck
