#pragma once

// Concrete model types, shared by training and serialization.

#include <memory>
#include <vector>

#include "dupliq/learn/model.hpp"

namespace dupliq::learn::detail {

nlohmann::json tree_to_json(const Tree& tree);
Tree tree_from_json(const nlohmann::json& doc);

class TreeModel final : public ClassifierModel {
 public:
  TreeModel(ClassifierSpec spec, std::size_t width, Tree tree, std::vector<double> importance);
  std::vector<double> native_importance() const override { return importance_; }
  nlohmann::json state_to_json() const override;
  const Tree& tree() const { return tree_; }

 protected:
  double predict_row(const Matrix& x, std::size_t row) const override;

 private:
  Tree tree_;
  std::vector<double> importance_;
};

/// Random forest and extra trees: fraction of trees voting positive.
class ForestModel final : public ClassifierModel {
 public:
  ForestModel(ClassifierSpec spec, std::size_t width, std::vector<Tree> trees,
              std::vector<double> importance);
  std::vector<double> native_importance() const override { return importance_; }
  nlohmann::json state_to_json() const override;

 protected:
  double predict_row(const Matrix& x, std::size_t row) const override;

 private:
  std::vector<Tree> trees_;
  std::vector<double> importance_;
};

class AdaBoostModel final : public ClassifierModel {
 public:
  AdaBoostModel(ClassifierSpec spec, std::size_t width, std::vector<Tree> stumps,
                std::vector<double> alphas, std::vector<double> importance);
  std::vector<double> native_importance() const override { return importance_; }
  nlohmann::json state_to_json() const override;

 protected:
  double predict_row(const Matrix& x, std::size_t row) const override;

 private:
  std::vector<Tree> stumps_;
  std::vector<double> alphas_;
  std::vector<double> importance_;
};

/// Additive log-odds model shared by gbm and xgb.
class BoostedModel final : public ClassifierModel {
 public:
  BoostedModel(ClassifierSpec spec, std::size_t width, double base, std::vector<Tree> trees,
               std::vector<double> importance);
  std::vector<double> native_importance() const override { return importance_; }
  nlohmann::json state_to_json() const override;
  double margin(const Matrix& x, std::size_t row, std::size_t rounds) const;
  std::size_t rounds() const { return trees_.size(); }

 protected:
  double predict_row(const Matrix& x, std::size_t row) const override;

 private:
  double base_;
  std::vector<Tree> trees_;
  std::vector<double> importance_;
};

class KnnModel final : public ClassifierModel {
 public:
  KnnModel(ClassifierSpec spec, Matrix train, std::vector<int> labels);
  nlohmann::json state_to_json() const override;
  const Matrix& training() const { return train_; }
  const std::vector<int>& labels() const { return labels_; }

 protected:
  double predict_row(const Matrix& x, std::size_t row) const override;

 private:
  std::size_t neighbors() const;
  double predict_dense(const Matrix& x, std::size_t row) const;
  double predict_sparse(const Matrix& x, std::size_t row) const;

  Matrix train_;
  std::vector<int> labels_;
  std::vector<double> norms_;  // sparse only
  // Inverted index over training columns (sparse only).
  std::vector<std::size_t> postptr_;
  std::vector<std::uint32_t> post_rows_;
  std::vector<double> post_values_;
};

std::vector<double> normalized(std::vector<double> importance);

}  // namespace dupliq::learn::detail
