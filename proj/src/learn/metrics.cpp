#include "dupliq/learn/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "dupliq/common.hpp"

namespace dupliq::learn {

Metrics compute_metrics(std::span<const double> proba, std::span<const int> y, double clip) {
  if (proba.empty()) throw ContractError("metrics need at least one prediction");
  if (proba.size() != y.size()) throw ContractError("predictions and labels differ in length");
  long long tp = 0, fp = 0, fn = 0, correct = 0;
  // Compensated extended-precision sum, so a constant prediction averages
  // back to its own per-row loss exactly.
  long double loss = 0, carry = 0;
  for (std::size_t i = 0; i < proba.size(); ++i) {
    const int predicted = proba[i] >= 0.5 ? 1 : 0;
    correct += predicted == y[i];
    tp += predicted == 1 && y[i] == 1;
    fp += predicted == 1 && y[i] == 0;
    fn += predicted == 0 && y[i] == 1;
    const double p = std::clamp(proba[i], clip, 1 - clip);
    const long double term = y[i] == 1 ? -std::log(p) : -std::log(1 - p);
    const long double t = loss + term;
    carry += std::fabs(loss) >= std::fabs(term) ? (loss - t) + term : (term - t) + loss;
    loss = t;
  }
  Metrics m;
  const auto n = static_cast<double>(proba.size());
  m.accuracy = static_cast<double>(correct) / n;
  m.precision = tp + fp ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
  m.recall = tp + fn ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
  m.f1 = m.precision + m.recall > 0 ? 2 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
  m.log_loss = static_cast<double>((loss + carry) / static_cast<long double>(proba.size()));
  return m;
}

Metrics evaluate(const ClassifierModel& model, const Matrix& x, std::span<const int> y) {
  const auto proba = model.predict_proba(x);
  return compute_metrics(proba, y);
}

}  // namespace dupliq::learn
