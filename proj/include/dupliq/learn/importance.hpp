#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dupliq/learn/model.hpp"

namespace dupliq::learn {

enum class ImportanceMethod { native_gain, permutation };

struct ImportanceEntry {
  std::string feature;
  double weight = 0;
};

struct ImportanceReport {
  ImportanceMethod method = ImportanceMethod::native_gain;
  std::vector<ImportanceEntry> ranked;  // descending weight
};

struct ImportanceOptions {
  bool force_permutation = false;
  int repeats = 10;
  std::uint64_t seed = 0;
};

/// Native split-gain importance for tree kinds; permutation importance (mean
/// accuracy drop over seeded column shuffles, floored at 0) otherwise or
/// when forced.
ImportanceReport feature_importance(const ClassifierModel& model, const Matrix& x,
                                    std::span<const int> y, std::span<const std::string> names,
                                    const ImportanceOptions& options = {});

std::vector<double> permutation_importance(const ClassifierModel& model, const Matrix& x,
                                           std::span<const int> y, int repeats, std::uint64_t seed);

}  // namespace dupliq::learn
