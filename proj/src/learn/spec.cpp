#include "dupliq/learn/spec.hpp"

#include "dupliq/common.hpp"

namespace dupliq::learn {

std::string_view kind_name(Kind kind) {
  switch (kind) {
    case Kind::knn: return "knn";
    case Kind::decision_tree: return "decision_tree";
    case Kind::random_forest: return "random_forest";
    case Kind::extra_trees: return "extra_trees";
    case Kind::adaboost: return "adaboost";
    case Kind::gbm: return "gbm";
    case Kind::xgb: return "xgb";
  }
  return "unknown";
}

std::string_view kind_label(Kind kind) {
  switch (kind) {
    case Kind::knn: return "K Nearest Neighbors";
    case Kind::decision_tree: return "Decision Tree";
    case Kind::random_forest: return "Random Forest";
    case Kind::extra_trees: return "ExtraTrees";
    case Kind::adaboost: return "AdaBoost";
    case Kind::gbm: return "Gradient Boost";
    case Kind::xgb: return "XGBoost";
  }
  return "unknown";
}

Kind parse_kind(std::string_view name) {
  for (Kind kind : kAllKinds) {
    if (kind_name(kind) == name) return kind;
  }
  throw ContractError("unknown classifier kind '" + std::string(name) + "'");
}

ClassifierSpec ClassifierSpec::defaults(Kind kind) {
  ClassifierSpec spec;
  spec.kind = kind;
  Hyperparameters& h = spec.hyper;
  switch (kind) {
    case Kind::knn:
      h.k = 5;
      break;
    case Kind::decision_tree:
      h.max_depth = 12;
      h.min_samples_leaf = 10;
      break;
    case Kind::random_forest:
      h.max_depth = 12;
      h.min_samples_leaf = 10;
      h.n_estimators = 100;
      h.bootstrap = true;
      break;
    case Kind::extra_trees:
      h.max_depth = 12;
      h.min_samples_leaf = 10;
      h.n_estimators = 100;
      h.bootstrap = false;
      break;
    case Kind::adaboost:
      h.n_estimators = 50;
      h.learning_rate = 1.0;
      h.max_depth = 1;
      h.min_samples_leaf = 1;
      break;
    case Kind::gbm:
    case Kind::xgb:
      h.n_estimators = 200;
      h.learning_rate = 0.1;
      h.max_depth = 4;
      h.min_samples_leaf = 1;
      h.lambda = 1.0;
      h.gamma = 0.0;
      break;
  }
  return spec;
}

void ClassifierSpec::validate() const {
  const Hyperparameters& h = hyper;
  if (kind == Kind::knn && h.k < 1) throw ContractError("knn needs k >= 1");
  if (h.min_samples_leaf < 1) throw ContractError("min_samples_leaf must be >= 1");
  if (h.n_estimators < 0) throw ContractError("n_estimators must be >= 0");
  if (h.max_depth == 0) throw ContractError("max_depth must be positive (or negative for unlimited)");
  if (h.learning_rate < 0) throw ContractError("learning_rate must be >= 0");
  if (h.lambda < 0 || h.gamma < 0) throw ContractError("lambda and gamma must be >= 0");
  if (!(h.subsample > 0 && h.subsample <= 1)) throw ContractError("subsample must lie in (0, 1]");
  if (h.max_features < 0) throw ContractError("max_features must be >= 0");
  if (h.permutation_repeats < 1) throw ContractError("permutation_repeats must be >= 1");
}

nlohmann::json spec_to_json(const ClassifierSpec& spec) {
  const Hyperparameters& h = spec.hyper;
  return {{"kind", kind_name(spec.kind)},
          {"hyperparameters",
           {{"k", h.k},
            {"max_depth", h.max_depth},
            {"min_samples_leaf", h.min_samples_leaf},
            {"n_estimators", h.n_estimators},
            {"learning_rate", h.learning_rate},
            {"lambda", h.lambda},
            {"gamma", h.gamma},
            {"subsample", h.subsample},
            {"min_child_weight", h.min_child_weight},
            {"max_features", h.max_features},
            {"bootstrap", h.bootstrap},
            {"permutation_repeats", h.permutation_repeats},
            {"seed", h.seed}}}};
}

ClassifierSpec spec_from_json(const nlohmann::json& doc) {
  try {
    ClassifierSpec spec = ClassifierSpec::defaults(parse_kind(doc.at("kind").get<std::string>()));
    Hyperparameters& h = spec.hyper;
    if (doc.contains("hyperparameters")) {
      for (const auto& [name, value] : doc.at("hyperparameters").items()) {
        if (name == "k") h.k = value.get<int>();
        else if (name == "max_depth") h.max_depth = value.get<int>();
        else if (name == "min_samples_leaf") h.min_samples_leaf = value.get<int>();
        else if (name == "n_estimators") h.n_estimators = value.get<int>();
        else if (name == "learning_rate") h.learning_rate = value.get<double>();
        else if (name == "lambda") h.lambda = value.get<double>();
        else if (name == "gamma") h.gamma = value.get<double>();
        else if (name == "subsample") h.subsample = value.get<double>();
        else if (name == "min_child_weight") h.min_child_weight = value.get<double>();
        else if (name == "max_features") h.max_features = value.get<int>();
        else if (name == "bootstrap") h.bootstrap = value.get<bool>();
        else if (name == "permutation_repeats") h.permutation_repeats = value.get<int>();
        else if (name == "seed") h.seed = value.get<std::uint64_t>();
        else throw ContractError("unknown hyperparameter '" + name + "'");
      }
    }
    spec.validate();
    return spec;
  } catch (const nlohmann::json::exception& e) {
    throw ContractError(std::string("malformed classifier spec: ") + e.what());
  }
}

}  // namespace dupliq::learn
