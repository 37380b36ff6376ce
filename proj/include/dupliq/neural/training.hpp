#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "dupliq/neural/network.hpp"

namespace dupliq::neural {

struct TrainConfig {
  std::size_t batch_size = 300;
  int epochs = 150;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t seed = 0;

  void validate() const;
};

struct EpochStats {
  int epoch = 0;
  double loss = 0;      // mean train-mode batch loss
  double accuracy = 0;  // train-mode predictions at 0.5
};

struct TrainingHistory {
  std::vector<EpochStats> epochs;
};

class Adam {
 public:
  Adam(std::vector<Parameter*> params, const TrainConfig& config);
  /// One update from the accumulated gradients of the trainable parameters.
  void step();
  long long steps() const { return t_; }

 private:
  std::vector<Parameter*> params_;
  std::vector<std::vector<double>> m_, v_;
  TrainConfig config_;
  long long t_ = 0;
};

using EpochCallback = std::function<void(const EpochStats&)>;

/// Index-encoded pairs for smoke runs: the first token of both questions is
/// 1 for duplicates and 2 otherwise, the rest are random indices >= 3.
/// With variable_length unset every position holds a token, which keeps
/// relu units fed by padding rows off their kink during gradient checks.
struct ToyPairs {
  std::vector<Tensor> inputs;  // q1, q2 as (n, seq_len)
  std::vector<int> labels;
  std::size_t vocab_size = 0;  // index space, padding included
};

ToyPairs separable_toy_pairs(std::size_t n, std::size_t seq_len, std::size_t vocab_size, std::uint64_t seed,
                             bool variable_length = true);

/// Mini-batch training on mean binary cross-entropy, batches reshuffled each
/// epoch. Throws Error when the loss turns non-finite.
TrainingHistory train_network(Network& net, std::span<const Tensor> inputs, std::span<const int> labels,
                              const TrainConfig& config, const EpochCallback& on_epoch = {});

struct GradCheckOptions {
  std::size_t max_coords = 24;  // scored coordinates per parameter tensor
  double step = 1e-5;           // scaled by max(1, |theta|)
  /// Trainable parameters are offset by uniform(-jitter, jitter) for the
  /// check and restored afterwards. Fresh networks have zero biases, which
  /// park relu inputs exactly on the kink.
  double jitter = 0.0;
  std::uint64_t seed = 0;
};

struct GradCheckEntry {
  std::string parameter;
  std::size_t checked = 0;
  std::size_t skipped = 0;  // crossed a kink or below finite-difference resolution
  double max_rel_error = 0;
};

struct GradCheckReport {
  double max_rel_error = 0;
  std::vector<GradCheckEntry> entries;
};

/// Back-propagated vs central-difference gradients of the summed loss, in
/// check mode, for every trainable parameter tensor. Coordinates where the
/// two one-sided differences disagree sharply sit on a kink (relu at zero,
/// max-pool tie) and are counted as skipped instead of scored, as are
/// coordinates whose gradient is too small for the step to resolve.
GradCheckReport gradient_check(Network& net, std::span<const Tensor> inputs, std::span<const int> labels,
                               const GradCheckOptions& options = {});

}  // namespace dupliq::neural
