#pragma once

#include <cstdint>
#include <nlohmann/json.hpp>
#include <string>
#include <string_view>
#include <vector>

namespace dupliq::learn {

enum class Kind { knn, decision_tree, random_forest, extra_trees, adaboost, gbm, xgb };

inline constexpr Kind kAllKinds[] = {Kind::knn,         Kind::adaboost, Kind::xgb,
                                     Kind::gbm,         Kind::decision_tree,
                                     Kind::random_forest, Kind::extra_trees};

std::string_view kind_name(Kind kind);
/// Human-readable table label, e.g. "K Nearest Neighbors".
std::string_view kind_label(Kind kind);
Kind parse_kind(std::string_view name);

/// Union of every kind's knobs; each kind reads the ones it uses.
/// max_depth < 0 means unlimited; max_features 0 means the kind's default
/// (sqrt of the width for forests, all columns otherwise).
struct Hyperparameters {
  int k = 5;
  int max_depth = 12;
  int min_samples_leaf = 10;
  int n_estimators = 100;
  double learning_rate = 0.1;
  double lambda = 1.0;
  double gamma = 0.0;
  double subsample = 1.0;
  double min_child_weight = 1.0;
  int max_features = 0;
  bool bootstrap = true;
  int permutation_repeats = 10;
  std::uint64_t seed = 0;

  bool operator==(const Hyperparameters&) const = default;
};

struct ClassifierSpec {
  Kind kind = Kind::xgb;
  Hyperparameters hyper;

  /// Default knobs for a kind.
  static ClassifierSpec defaults(Kind kind);
  /// Throws ContractError when a knob is out of range for the kind.
  void validate() const;

  bool operator==(const ClassifierSpec&) const = default;
};

/// {"kind": "...", "hyperparameters": {...}}; missing knobs take the kind's
/// defaults, unknown knob names are rejected.
nlohmann::json spec_to_json(const ClassifierSpec& spec);
ClassifierSpec spec_from_json(const nlohmann::json& doc);

}  // namespace dupliq::learn
