#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dupliq/learn/matrix.hpp"
#include "dupliq/rng.hpp"

namespace dupliq::learn {

/// Node of a binary tree; feature < 0 marks a leaf. Rows with
/// x[feature] <= threshold go left.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;  // leaf output
  double gain = 0.0;   // split gain, 0 for leaves
  double weight = 0.0; // sample weight reaching the node
};

struct Tree {
  std::vector<TreeNode> nodes;

  double predict(const Matrix& x, std::size_t row) const;
  std::size_t depth() const;
};

/// How split quality is scored.
enum class Criterion {
  gini,     // classification; g holds the positive weight
  squared,  // least squares on residuals g, Newton leaf g / h
  newton,   // second order: gradient g, hessian h, leaf -g / (h + lambda)
};

struct TreeParams {
  Criterion criterion = Criterion::gini;
  int max_depth = 12;            // < 0: unlimited
  double min_leaf_weight = 1.0;  // per child, in sample-weight units
  double min_child_hessian = 0.0;
  double lambda = 1.0;
  double gamma = 0.0;
  std::size_t max_features = 0;  // 0: all columns
  bool random_thresholds = false;
};

/// Grows one tree level by level with exact split search over `columns`.
/// Rows with zero weight do not participate. Per-feature split gains are
/// added to `importance` when it is non-null.
Tree grow_tree(const ColumnStore& columns, const Matrix& x, std::span<const double> weight,
               std::span<const double> g, std::span<const double> h, const TreeParams& params,
               Rng& rng, std::vector<double>* importance = nullptr);

}  // namespace dupliq::learn
