#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dupliq/learn/model.hpp"

namespace dupliq::learn {

inline constexpr double kDefaultValidationFraction = 0.10;

struct GridEntry {
  ClassifierSpec spec;
  double accuracy = 0;
};

struct GridResult {
  ClassifierSpec best;
  std::vector<GridEntry> table;  // grid order
};

/// Scores every spec on a stratified validation slice carved from the given
/// (training) rows; the rest trains. Ties keep the earliest spec.
GridResult grid_search(std::span<const ClassifierSpec> grid, const Matrix& x, std::span<const int> y,
                       double val_fraction = kDefaultValidationFraction, std::uint64_t seed = 0);

}  // namespace dupliq::learn
