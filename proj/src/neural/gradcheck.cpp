#include <algorithm>
#include <cmath>

#include "dupliq/common.hpp"
#include "dupliq/neural/training.hpp"

namespace dupliq::neural {

namespace {

// One-sided slopes that disagree by more than this (per unit step) mean the
// step crossed a kink, e.g. a relu at zero or a max-pool tie. A smooth loss
// with curvature below the bound cannot produce it.
constexpr double kCurvatureBound = 100.0;

// Below this magnitude a central difference at the default step is mostly
// rounding noise from the forward pass (about 1e-10), so the coordinate is
// skipped rather than scored.
constexpr double kResolvableGradient = 1e-6;

constexpr std::size_t kAttemptsPerCoordinate = 4;

// Summed cross-entropy at logits a minus the same at logits b. Each term uses
// softplus(a) - softplus(b) = log1p(expm1(a - b) * sigmoid(b)), so the
// difference is not swamped by the rounding of the losses themselves.
double loss_difference(const Tensor& a, const Tensor& b, std::span<const int> labels) {
  double total = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    total += std::log1p(std::expm1(d) * sigmoid(b[i])) - labels[i] * d;
  }
  return total;
}

}  // namespace

GradCheckReport gradient_check(Network& net, std::span<const Tensor> inputs, std::span<const int> labels,
                               const GradCheckOptions& options) {
  if (inputs.empty() || inputs[0].rank() != 2 || inputs[0].dim(0) != labels.size()) {
    throw ContractError("labels do not match the batch");
  }
  Rng rng(options.seed);
  std::vector<std::vector<double>> saved;
  if (options.jitter > 0) {
    for (Parameter* p : net.parameters()) {
      if (!p->trainable) continue;
      saved.push_back(p->value.data);
      for (double& v : p->value.data) v += rng.uniform(-options.jitter, options.jitter);
    }
  }

  net.zero_grad();
  const Tensor z = net.logits(inputs, Mode::check);
  Tensor dz(z.shape);
  for (std::size_t i = 0; i < z.size(); ++i) dz[i] = sigmoid(z[i]) - labels[i];
  net.backward(dz);

  GradCheckReport report;
  std::size_t index = 0;
  for (Parameter* p : net.parameters()) {
    ++index;
    if (!p->trainable) continue;
    const std::vector<double> analytic = p->grad.data;
    // Coordinates with a non-zero gradient first, so sparse tensors such as
    // embeddings are checked where they matter.
    std::vector<std::size_t> live, dead;
    for (std::size_t k = 0; k < analytic.size(); ++k) (analytic[k] != 0.0 ? live : dead).push_back(k);
    rng.shuffle(std::span<std::size_t>(live));
    rng.shuffle(std::span<std::size_t>(dead));
    std::vector<std::size_t> coords = live;
    coords.insert(coords.end(), dead.begin(), dead.end());
    if (coords.size() > kAttemptsPerCoordinate * options.max_coords) {
      coords.resize(kAttemptsPerCoordinate * options.max_coords);
    }

    GradCheckEntry entry{std::to_string(index) + ":" + p->name, 0, 0, 0.0};
    for (std::size_t k : coords) {
      if (entry.checked == options.max_coords) break;
      double& theta = p->value[k];
      const double original = theta;
      const double h = options.step * std::max(1.0, std::abs(original));
      theta = original + h;
      const Tensor plus = net.logits(inputs, Mode::check);
      theta = original - h;
      const Tensor minus = net.logits(inputs, Mode::check);
      theta = original;
      const double forward = loss_difference(plus, z, labels) / h;
      const double backward = loss_difference(z, minus, labels) / h;
      if (std::abs(forward - backward) > std::max(kCurvatureBound * h, 1e-3 * std::max(std::abs(forward), std::abs(backward)))) {
        ++entry.skipped;
        continue;
      }
      const double numeric = loss_difference(plus, minus, labels) / (2 * h);
      if (std::max(std::abs(analytic[k]), std::abs(numeric)) < kResolvableGradient) {
        ++entry.skipped;
        continue;
      }
      ++entry.checked;
      const double err = std::abs(analytic[k] - numeric) / std::max({std::abs(analytic[k]), std::abs(numeric), 1e-8});
      entry.max_rel_error = std::max(entry.max_rel_error, err);
    }
    report.max_rel_error = std::max(report.max_rel_error, entry.max_rel_error);
    report.entries.push_back(std::move(entry));
  }
  if (!saved.empty()) {
    std::size_t i = 0;
    for (Parameter* p : net.parameters()) {
      if (p->trainable) p->value.data = std::move(saved[i++]);
    }
  }
  net.zero_grad();
  return report;
}

}  // namespace dupliq::neural
