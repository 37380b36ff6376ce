#pragma once

#include <filesystem>
#include <memory>
#include <nlohmann/json.hpp>
#include <span>
#include <vector>

#include "dupliq/learn/matrix.hpp"
#include "dupliq/learn/spec.hpp"
#include "dupliq/learn/tree.hpp"

namespace dupliq::learn {

/// A trained binary classifier. Immutable after training; prediction is safe
/// to call concurrently.
class ClassifierModel {
 public:
  virtual ~ClassifierModel() = default;

  const ClassifierSpec& spec() const { return spec_; }
  std::size_t width() const { return width_; }

  /// P(label = 1) per row. Throws ContractError on a width mismatch.
  std::vector<double> predict_proba(const Matrix& x) const;
  /// Hard labels at the 0.5 threshold.
  std::vector<int> predict(const Matrix& x) const;

  /// Normalized split-gain importance per column; empty for kinds without
  /// native importance (knn).
  virtual std::vector<double> native_importance() const { return {}; }

  virtual nlohmann::json state_to_json() const = 0;

 protected:
  ClassifierModel(ClassifierSpec spec, std::size_t width) : spec_(spec), width_(width) {}
  virtual double predict_row(const Matrix& x, std::size_t row) const = 0;

 private:
  ClassifierSpec spec_;
  std::size_t width_;
};

/// Trains the kind named in `spec`. Requires at least two rows, both labels
/// present and finite inputs; deterministic for a fixed spec seed.
std::unique_ptr<ClassifierModel> train(const ClassifierSpec& spec, const Matrix& x,
                                       std::span<const int> y);

/// Wraps a fixed tree as a decision_tree model (fixtures, deserialization).
std::unique_ptr<ClassifierModel> make_tree_model(Tree tree, std::size_t width);

/// Gradient-boosted model staged predictions: margin after `rounds` rounds.
std::vector<double> staged_margin(const ClassifierModel& model, const Matrix& x, std::size_t rounds);

/// Versioned JSON for every kind. KNN models record `training_data`, the
/// path of the matrix they were fit on, and reload it in load_model.
nlohmann::json model_to_json(const ClassifierModel& model, const std::string& training_data = "");
std::unique_ptr<ClassifierModel> model_from_json(const nlohmann::json& doc);
void save_model(const ClassifierModel& model, const std::filesystem::path& path,
                const std::string& training_data = "");
std::unique_ptr<ClassifierModel> load_model(const std::filesystem::path& path);

}  // namespace dupliq::learn
