#pragma once

#include <span>

#include "dupliq/learn/model.hpp"

namespace dupliq::learn {

inline constexpr double kLogLossClip = 1e-15;

struct Metrics {
  double accuracy = 0;
  double precision = 0;  // 0 when nothing is predicted positive
  double recall = 0;     // 0 when no positives exist
  double f1 = 0;         // 0 when precision + recall == 0
  double log_loss = 0;
};

/// Metrics of probabilities against labels; hard labels at p >= 0.5 and
/// log loss with p clipped to [clip, 1 - clip]. Empty input throws.
Metrics compute_metrics(std::span<const double> proba, std::span<const int> y,
                        double clip = kLogLossClip);

Metrics evaluate(const ClassifierModel& model, const Matrix& x, std::span<const int> y);

}  // namespace dupliq::learn
