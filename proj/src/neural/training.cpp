#include "dupliq/neural/training.hpp"

#include <cmath>
#include <numeric>

#include "dupliq/common.hpp"

namespace dupliq::neural {

void TrainConfig::validate() const {
  if (batch_size < 1) throw ContractError("batch_size must be >= 1");
  if (epochs < 1) throw ContractError("epochs must be >= 1");
  if (learning_rate < 0) throw ContractError("learning rate must be >= 0");
  if (!(beta1 >= 0 && beta1 < 1 && beta2 >= 0 && beta2 < 1)) throw ContractError("Adam decay rates must lie in [0, 1)");
  if (!(epsilon > 0)) throw ContractError("Adam epsilon must be positive");
}

Adam::Adam(std::vector<Parameter*> params, const TrainConfig& config) : config_(config) {
  for (Parameter* p : params) {
    if (!p->trainable) continue;
    params_.push_back(p);
    m_.emplace_back(p->value.size(), 0.0);
    v_.emplace_back(p->value.size(), 0.0);
  }
}

void Adam::step() {
  ++t_;
  const double c1 = 1 - std::pow(config_.beta1, static_cast<double>(t_));
  const double c2 = 1 - std::pow(config_.beta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params_.size(); ++i) {
    auto& value = params_[i]->value.data;
    const auto& grad = params_[i]->grad.data;
    auto& m = m_[i];
    auto& v = v_[i];
    for (std::size_t k = 0; k < value.size(); ++k) {
      m[k] = config_.beta1 * m[k] + (1 - config_.beta1) * grad[k];
      v[k] = config_.beta2 * v[k] + (1 - config_.beta2) * grad[k] * grad[k];
      value[k] -= config_.learning_rate * (m[k] / c1) / (std::sqrt(v[k] / c2) + config_.epsilon);
    }
  }
}

namespace {

std::size_t check_dataset(const Network& net, std::span<const Tensor> inputs, std::span<const int> labels) {
  if (inputs.size() != net.input_count()) throw ContractError("wrong number of network inputs");
  const std::size_t n = labels.size();
  for (const Tensor& in : inputs) {
    if (in.rank() != 2 || in.dim(0) != n) throw ContractError("inputs and labels differ in length");
  }
  for (int y : labels) {
    if (y != 0 && y != 1) throw ContractError("labels must be 0 or 1");
  }
  if (n == 0) throw ContractError("training needs at least one example");
  return n;
}

}  // namespace

ToyPairs separable_toy_pairs(std::size_t n, std::size_t seq_len, std::size_t vocab_size, std::uint64_t seed,
                             bool variable_length) {
  if (vocab_size < 4) throw ContractError("toy pairs need a vocabulary of at least 4 indices");
  if (seq_len == 0) throw ContractError("toy pairs need a positive sequence length");
  Rng rng(seed);
  ToyPairs toy;
  toy.vocab_size = vocab_size;
  toy.inputs.assign(2, Tensor({n, seq_len}));
  for (std::size_t i = 0; i < n; ++i) {
    const int label = static_cast<int>(i % 2);
    toy.labels.push_back(label);
    for (Tensor& side : toy.inputs) {
      side[i * seq_len] = label ? 1.0 : 2.0;
      // Random lengths leave some post-padding.
      const std::size_t length = variable_length ? 1 + rng.below(seq_len) : seq_len;
      for (std::size_t t = 1; t < length; ++t) side[i * seq_len + t] = static_cast<double>(3 + rng.below(vocab_size - 3));
    }
  }
  return toy;
}

TrainingHistory train_network(Network& net, std::span<const Tensor> inputs, std::span<const int> labels,
                              const TrainConfig& config, const EpochCallback& on_epoch) {
  config.validate();
  const std::size_t n = check_dataset(net, inputs, labels);
  net.rng() = Rng(config.seed ^ 0x2545F4914F6CDD1DULL);
  Rng shuffler(config.seed);
  Adam adam(net.parameters(), config);
  TrainingHistory history;
  std::vector<std::size_t> order(n);
  std::vector<Tensor> batch(inputs.size());
  std::vector<int> batch_labels;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), 0);
    shuffler.shuffle(std::span<std::size_t>(order));
    double loss_sum = 0;
    std::size_t correct = 0;
    for (std::size_t start = 0, batch_no = 0; start < n; start += config.batch_size, ++batch_no) {
      const std::span<const std::size_t> rows(order.data() + start, std::min(config.batch_size, n - start));
      for (std::size_t i = 0; i < inputs.size(); ++i) batch[i] = take_rows(inputs[i], rows);
      batch_labels.clear();
      for (std::size_t r : rows) batch_labels.push_back(labels[r]);

      net.zero_grad();
      const Tensor z = net.logits(batch, Mode::train);
      const double loss = bce_from_logits(z.data, batch_labels);
      if (!std::isfinite(loss)) {
        throw Error("training loss became non-finite at epoch " + std::to_string(epoch) + ", batch " +
                    std::to_string(batch_no) + " (learning rate " + format_double(config.learning_rate) +
                    "); last epoch loss " +
                    (history.epochs.empty() ? std::string("n/a") : format_double(history.epochs.back().loss)));
      }
      Tensor dz(z.shape);
      const double scale = 1.0 / static_cast<double>(rows.size());
      for (std::size_t i = 0; i < rows.size(); ++i) {
        const double p = sigmoid(z[i]);
        dz[i] = (p - batch_labels[i]) * scale;
        correct += (p >= 0.5 ? 1 : 0) == batch_labels[i];
      }
      net.backward(dz);
      adam.step();
      loss_sum += loss * static_cast<double>(rows.size());
    }
    EpochStats stats{epoch, loss_sum / static_cast<double>(n), static_cast<double>(correct) / static_cast<double>(n)};
    history.epochs.push_back(stats);
    if (on_epoch) on_epoch(stats);
  }
  return history;
}

}  // namespace dupliq::neural
