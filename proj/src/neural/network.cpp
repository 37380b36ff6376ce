#include "dupliq/neural/network.hpp"

#include <cmath>

#include "dupliq/common.hpp"

namespace dupliq::neural {

namespace {

std::size_t count_params(const std::vector<LayerPtr>& layers, bool trainable_only) {
  std::size_t n = 0;
  for (const auto& layer : layers) {
    for (const Parameter* p : layer->parameters()) {
      if (!trainable_only || p->trainable) n += p->value.size();
    }
  }
  return n;
}

nlohmann::json describe_layers(const std::vector<LayerPtr>& layers) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& layer : layers) {
    std::size_t params = 0;
    for (const Parameter* p : layer->parameters()) params += p->value.size();
    out.push_back({{"kind", layer_kind_name(layer->kind())}, {"config", layer->config()}, {"parameters", params}});
  }
  return out;
}

}  // namespace

Network::Network(std::vector<Branch> branches, std::vector<LayerPtr> head, std::size_t input_count,
                 std::size_t sequence_length, std::uint64_t seed)
    : branches_(std::move(branches)), head_(std::move(head)), inputs_(input_count), seq_len_(sequence_length), rng_(seed) {
  if (branches_.empty()) throw ContractError("a network needs at least one branch");
  if (head_.size() < 2 || head_.back()->kind() != LayerKind::sigmoid || head_[head_.size() - 2]->kind() != LayerKind::dense ||
      head_[head_.size() - 2]->output_width(0) != 1) {
    throw ContractError("the head must end in a width-1 dense layer followed by sigmoid");
  }
  head_.pop_back();
  for (const Branch& branch : branches_) {
    if (branch.input >= inputs_) throw ContractError("branch reads a missing input");
    if (branch.layers.empty()) throw ContractError("empty branch");
    std::size_t width = seq_len_;
    for (const auto& layer : branch.layers) width = layer->output_width(width);
    branch_widths_.push_back(width);
    merge_width_ += width;
  }
  for (std::size_t width : branch_widths_) {
    if (width != branch_widths_.front()) throw ContractError("branch outputs differ in width at the merge");
  }
}

Tensor Network::logits(std::span<const Tensor> inputs, Mode mode) {
  if (inputs.size() != inputs_) {
    throw ContractError("network expects " + std::to_string(inputs_) + " inputs, got " + std::to_string(inputs.size()));
  }
  const std::size_t batch = inputs[0].rank() == 2 ? inputs[0].dim(0) : 0;
  for (const Tensor& in : inputs) {
    if (in.rank() != 2 || in.dim(0) != batch || in.dim(1) != seq_len_) {
      throw ContractError("network inputs must be (batch, " + std::to_string(seq_len_) + "), got " +
                          shape_string(in.shape));
    }
  }
  Tensor merged({batch, merge_width_});
  std::size_t offset = 0;
  for (std::size_t bi = 0; bi < branches_.size(); ++bi) {
    Tensor h = inputs[branches_[bi].input];
    for (auto& layer : branches_[bi].layers) h = layer->forward(h, mode, rng_);
    const std::size_t w = branch_widths_[bi];
    if (h.rank() != 2 || h.dim(1) != w) throw ContractError("branch produced shape " + shape_string(h.shape));
    for (std::size_t b = 0; b < batch; ++b) {
      std::copy_n(h.data.begin() + static_cast<std::ptrdiff_t>(b * w), w,
                  merged.data.begin() + static_cast<std::ptrdiff_t>(b * merge_width_ + offset));
    }
    offset += w;
  }
  Tensor h = std::move(merged);
  for (auto& layer : head_) h = layer->forward(h, mode, rng_);
  return h;
}

std::vector<double> Network::forward(std::span<const Tensor> inputs, Mode mode) {
  const Tensor z = logits(inputs, mode);
  std::vector<double> p(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) p[i] = sigmoid(z[i]);
  return p;
}

void Network::backward(const Tensor& dlogits) {
  Tensor d = dlogits;
  for (auto it = head_.rbegin(); it != head_.rend(); ++it) d = (*it)->backward(d);
  const std::size_t batch = d.dim(0);
  std::size_t offset = 0;
  for (std::size_t bi = 0; bi < branches_.size(); ++bi) {
    const std::size_t w = branch_widths_[bi];
    Tensor part({batch, w});
    for (std::size_t b = 0; b < batch; ++b) {
      std::copy_n(d.data.begin() + static_cast<std::ptrdiff_t>(b * merge_width_ + offset), w,
                  part.data.begin() + static_cast<std::ptrdiff_t>(b * w));
    }
    offset += w;
    auto& layers = branches_[bi].layers;
    for (auto it = layers.rbegin(); it != layers.rend(); ++it) part = (*it)->backward(part);
  }
}

std::vector<Parameter*> Network::parameters() {
  std::vector<Parameter*> out;
  for (auto& branch : branches_) {
    for (auto& layer : branch.layers) {
      for (Parameter* p : layer->parameters()) out.push_back(p);
    }
  }
  for (auto& layer : head_) {
    for (Parameter* p : layer->parameters()) out.push_back(p);
  }
  return out;
}

void Network::zero_grad() {
  for (Parameter* p : parameters()) std::fill(p->grad.data.begin(), p->grad.data.end(), 0.0);
}

std::size_t Network::parameter_count() const {
  std::size_t n = count_params(head_, false);
  for (const auto& branch : branches_) n += count_params(branch.layers, false);
  return n;
}

std::size_t Network::trainable_parameter_count() const {
  std::size_t n = count_params(head_, true);
  for (const auto& branch : branches_) n += count_params(branch.layers, true);
  return n;
}

nlohmann::json Network::describe() const {
  nlohmann::json branches = nlohmann::json::array();
  for (const auto& branch : branches_) {
    branches.push_back({{"input", branch.input}, {"layers", describe_layers(branch.layers)}});
  }
  nlohmann::json head = describe_layers(head_);
  head.push_back({{"kind", "sigmoid"}, {"config", nlohmann::json::object()}, {"parameters", 0}});
  return {{"inputs", inputs_},
          {"sequence_length", seq_len_},
          {"branches", branches},
          {"merge", {{"kind", "concat"}, {"width", merge_width_}}},
          {"head", head},
          {"parameters", parameter_count()},
          {"trainable_parameters", trainable_parameter_count()}};
}

double bce_from_logits(std::span<const double> logits, std::span<const int> labels, bool sum) {
  if (logits.size() != labels.size()) throw ContractError("logits and labels differ in length");
  if (logits.empty()) throw ContractError("loss over an empty batch");
  double total = 0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    const double z = logits[i];
    total += std::max(z, 0.0) - z * labels[i] + std::log1p(std::exp(-std::abs(z)));
  }
  return sum ? total : total / static_cast<double>(logits.size());
}

}  // namespace dupliq::neural
