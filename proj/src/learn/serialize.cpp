#include <fstream>

#include "dupliq/common.hpp"
#include "models.hpp"

namespace dupliq::learn {

namespace detail {

namespace {

constexpr int kFormatVersion = 1;

nlohmann::json trees_to_json(const std::vector<Tree>& trees) {
  nlohmann::json out = nlohmann::json::array();
  for (const Tree& tree : trees) out.push_back(tree_to_json(tree));
  return out;
}

std::vector<Tree> trees_from_json(const nlohmann::json& doc) {
  std::vector<Tree> trees;
  for (const auto& item : doc) trees.push_back(tree_from_json(item));
  return trees;
}

}  // namespace

nlohmann::json tree_to_json(const Tree& tree) {
  nlohmann::json feature = nlohmann::json::array(), threshold = nlohmann::json::array(),
                 left = nlohmann::json::array(), right = nlohmann::json::array(),
                 value = nlohmann::json::array(), gain = nlohmann::json::array(),
                 weight = nlohmann::json::array();
  for (const TreeNode& node : tree.nodes) {
    feature.push_back(node.feature);
    threshold.push_back(node.threshold);
    left.push_back(node.left);
    right.push_back(node.right);
    value.push_back(node.value);
    gain.push_back(node.gain);
    weight.push_back(node.weight);
  }
  return {{"feature", feature}, {"threshold", threshold}, {"left", left}, {"right", right},
          {"value", value},     {"gain", gain},           {"weight", weight}};
}

Tree tree_from_json(const nlohmann::json& doc) {
  const auto& feature = doc.at("feature");
  const std::size_t n = feature.size();
  Tree tree;
  tree.nodes.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    TreeNode& node = tree.nodes[i];
    node.feature = feature.at(i).get<int>();
    node.threshold = doc.at("threshold").at(i).get<double>();
    node.left = doc.at("left").at(i).get<int>();
    node.right = doc.at("right").at(i).get<int>();
    node.value = doc.at("value").at(i).get<double>();
    node.gain = doc.at("gain").at(i).get<double>();
    node.weight = doc.at("weight").at(i).get<double>();
  }
  for (std::size_t i = 0; i < n; ++i) {
    const TreeNode& node = tree.nodes[i];
    if (node.feature < 0) continue;
    const auto valid = [&](int child) { return child > static_cast<int>(i) && child < static_cast<int>(n); };
    if (!valid(node.left) || !valid(node.right)) throw ContractError("tree node has an invalid child index");
  }
  if (n == 0) throw ContractError("tree has no nodes");
  return tree;
}

nlohmann::json TreeModel::state_to_json() const {
  return {{"tree", tree_to_json(tree_)}, {"importance", importance_}};
}

nlohmann::json ForestModel::state_to_json() const {
  return {{"trees", trees_to_json(trees_)}, {"importance", importance_}};
}

nlohmann::json AdaBoostModel::state_to_json() const {
  return {{"stumps", trees_to_json(stumps_)}, {"alphas", alphas_}, {"importance", importance_}};
}

nlohmann::json BoostedModel::state_to_json() const {
  return {{"base", base_}, {"trees", trees_to_json(trees_)}, {"importance", importance_}};
}

nlohmann::json KnnModel::state_to_json() const {
  return {{"storage", train_.is_sparse() ? "sparse" : "dense"},
          {"rows", train_.rows()},
          {"cols", train_.cols()}};
}

}  // namespace detail

using namespace detail;

namespace {

nlohmann::json inline_matrix(const KnnModel& knn) {
  const Matrix& m = knn.training();
  nlohmann::json doc = {{"labels", knn.labels()}};
  if (m.is_sparse()) {
    doc["indptr"] = m.csr().indptr;
    doc["indices"] = m.csr().indices;
    doc["values"] = m.csr().values;
  } else {
    doc["values"] = m.dense_values();
  }
  return doc;
}

Matrix to_storage(CsrMatrix csr, bool sparse) {
  if (sparse) return Matrix::sparse(std::move(csr));
  std::vector<double> values(csr.rows * csr.cols, 0.0);
  for (std::size_t r = 0; r < csr.rows; ++r) {
    for (std::size_t k = csr.indptr[r]; k < csr.indptr[r + 1]; ++k) values[r * csr.cols + csr.indices[k]] = csr.values[k];
  }
  return Matrix::dense(csr.rows, csr.cols, std::move(values));
}

std::unique_ptr<ClassifierModel> knn_from_json(const ClassifierSpec& spec, const nlohmann::json& doc) {
  const nlohmann::json& state = doc.at("state");
  const bool sparse = state.at("storage").get<std::string>() == "sparse";
  const auto rows = state.at("rows").get<std::size_t>();
  const auto cols = state.at("cols").get<std::size_t>();
  CsrMatrix csr;
  std::vector<int> labels;
  if (state.contains("matrix")) {
    const auto& m = state.at("matrix");
    labels = m.at("labels").get<std::vector<int>>();
    if (sparse) {
      csr.rows = rows;
      csr.cols = cols;
      csr.indptr = m.at("indptr").get<std::vector<std::size_t>>();
      csr.indices = m.at("indices").get<std::vector<std::uint32_t>>();
      csr.values = m.at("values").get<std::vector<double>>();
      return std::make_unique<KnnModel>(spec, Matrix::sparse(std::move(csr)), std::move(labels));
    }
    return std::make_unique<KnnModel>(spec, Matrix::dense(rows, cols, m.at("values").get<std::vector<double>>()),
                                      std::move(labels));
  }
  const std::string path = doc.at("training_data").get<std::string>();
  std::tie(csr, labels) = load_svmlight(path);
  if (csr.rows != rows || csr.cols != cols) {
    throw ContractError("knn training data " + path + " does not match the saved shape");
  }
  return std::make_unique<KnnModel>(spec, to_storage(std::move(csr), sparse), std::move(labels));
}

}  // namespace

nlohmann::json model_to_json(const ClassifierModel& model, const std::string& training_data) {
  nlohmann::json doc = {{"format", "dupliq-classifier"},
                        {"version", kFormatVersion},
                        {"spec", spec_to_json(model.spec())},
                        {"width", model.width()},
                        {"state", model.state_to_json()}};
  if (const auto* knn = dynamic_cast<const KnnModel*>(&model)) {
    if (training_data.empty()) {
      doc["state"]["matrix"] = inline_matrix(*knn);
    } else {
      doc["training_data"] = training_data;
    }
  }
  return doc;
}

std::unique_ptr<ClassifierModel> model_from_json(const nlohmann::json& doc) {
  try {
    if (doc.at("format").get<std::string>() != "dupliq-classifier") throw ContractError("not a classifier model");
    if (doc.at("version").get<int>() != kFormatVersion) throw ContractError("unsupported model version");
    const ClassifierSpec spec = spec_from_json(doc.at("spec"));
    const auto width = doc.at("width").get<std::size_t>();
    const nlohmann::json& state = doc.at("state");
    const auto importance = [&] { return state.at("importance").get<std::vector<double>>(); };
    switch (spec.kind) {
      case Kind::knn:
        return knn_from_json(spec, doc);
      case Kind::decision_tree:
        return std::make_unique<TreeModel>(spec, width, tree_from_json(state.at("tree")), importance());
      case Kind::random_forest:
      case Kind::extra_trees:
        return std::make_unique<ForestModel>(spec, width, trees_from_json(state.at("trees")), importance());
      case Kind::adaboost:
        return std::make_unique<AdaBoostModel>(spec, width, trees_from_json(state.at("stumps")),
                                               state.at("alphas").get<std::vector<double>>(), importance());
      case Kind::gbm:
      case Kind::xgb:
        return std::make_unique<BoostedModel>(spec, width, state.at("base").get<double>(),
                                              trees_from_json(state.at("trees")), importance());
    }
  } catch (const nlohmann::json::exception& e) {
    throw ContractError(std::string("malformed model document: ") + e.what());
  }
  throw ContractError("unsupported classifier kind");
}

void save_model(const ClassifierModel& model, const std::filesystem::path& path, const std::string& training_data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << model_to_json(model, training_data).dump() << '\n';
  if (!out) throw IoError("failed writing " + path.string());
}

std::unique_ptr<ClassifierModel> load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ContractError(path.string() + ": " + e.what());
  }
  return model_from_json(doc);
}

}  // namespace dupliq::learn
