#include "dupliq/learn/importance.hpp"

#include <algorithm>
#include <numeric>

#include "dupliq/common.hpp"
#include "dupliq/learn/metrics.hpp"
#include "dupliq/rng.hpp"

namespace dupliq::learn {

namespace {

double accuracy(const ClassifierModel& model, const Matrix& x, std::span<const int> y) {
  const auto labels = model.predict(x);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) correct += labels[i] == y[i];
  return static_cast<double>(correct) / static_cast<double>(labels.size());
}

}  // namespace

std::vector<double> permutation_importance(const ClassifierModel& model, const Matrix& x,
                                           std::span<const int> y, int repeats, std::uint64_t seed) {
  if (x.rows() != y.size() || x.rows() == 0) throw ContractError("importance needs matching, non-empty rows and labels");
  if (repeats < 1) throw ContractError("repeats must be >= 1");
  const double baseline = accuracy(model, x, y);
  Rng rng(seed);
  std::vector<double> drops(x.cols(), 0.0);
  std::vector<std::size_t> perm(x.rows());
  for (std::size_t c = 0; c < x.cols(); ++c) {
    double total = 0;
    for (int r = 0; r < repeats; ++r) {
      std::iota(perm.begin(), perm.end(), 0);
      rng.shuffle(std::span<std::size_t>(perm));
      total += baseline - accuracy(model, x.with_permuted_column(c, perm), y);
    }
    drops[c] = std::max(0.0, total / repeats);
  }
  return drops;
}

ImportanceReport feature_importance(const ClassifierModel& model, const Matrix& x, std::span<const int> y,
                                    std::span<const std::string> names, const ImportanceOptions& options) {
  if (names.size() != model.width()) throw ContractError("feature names do not match the model width");
  ImportanceReport report;
  std::vector<double> weights = options.force_permutation ? std::vector<double>{} : model.native_importance();
  if (weights.empty()) {
    report.method = ImportanceMethod::permutation;
    weights = permutation_importance(model, x, y, options.repeats, options.seed);
  }
  std::vector<std::size_t> order(weights.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return weights[a] > weights[b]; });
  for (std::size_t c : order) report.ranked.push_back({names[c], weights[c]});
  return report;
}

}  // namespace dupliq::learn
