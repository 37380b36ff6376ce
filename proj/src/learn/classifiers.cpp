#include <algorithm>
#include <cmath>
#include <numeric>

#include "dupliq/common.hpp"
#include "dupliq/rng.hpp"
#include "models.hpp"

namespace dupliq::learn {

std::vector<double> ClassifierModel::predict_proba(const Matrix& x) const {
  if (x.cols() != width_) {
    throw ContractError("model expects " + std::to_string(width_) + " columns, got " +
                        std::to_string(x.cols()));
  }
  std::vector<double> out(x.rows());
  parallel_for(x.rows(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) out[r] = predict_row(x, r);
  });
  return out;
}

std::vector<int> ClassifierModel::predict(const Matrix& x) const {
  const auto proba = predict_proba(x);
  std::vector<int> labels(proba.size());
  std::transform(proba.begin(), proba.end(), labels.begin(), [](double p) { return p >= 0.5 ? 1 : 0; });
  return labels;
}

namespace detail {

namespace {

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

std::size_t sqrt_features(std::size_t width) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(width))));
}

}  // namespace

std::vector<double> normalized(std::vector<double> importance) {
  const double total = std::accumulate(importance.begin(), importance.end(), 0.0);
  if (total > 0) {
    for (double& v : importance) v /= total;
  }
  return importance;
}

TreeModel::TreeModel(ClassifierSpec spec, std::size_t width, Tree tree, std::vector<double> importance)
    : ClassifierModel(spec, width), tree_(std::move(tree)), importance_(std::move(importance)) {}

double TreeModel::predict_row(const Matrix& x, std::size_t row) const { return tree_.predict(x, row); }

ForestModel::ForestModel(ClassifierSpec spec, std::size_t width, std::vector<Tree> trees,
                         std::vector<double> importance)
    : ClassifierModel(spec, width), trees_(std::move(trees)), importance_(std::move(importance)) {}

double ForestModel::predict_row(const Matrix& x, std::size_t row) const {
  if (trees_.empty()) return 0.5;
  std::size_t votes = 0;
  for (const Tree& tree : trees_) votes += tree.predict(x, row) >= 0.5 ? 1 : 0;
  return static_cast<double>(votes) / static_cast<double>(trees_.size());
}

AdaBoostModel::AdaBoostModel(ClassifierSpec spec, std::size_t width, std::vector<Tree> stumps,
                             std::vector<double> alphas, std::vector<double> importance)
    : ClassifierModel(spec, width),
      stumps_(std::move(stumps)),
      alphas_(std::move(alphas)),
      importance_(std::move(importance)) {}

double AdaBoostModel::predict_row(const Matrix& x, std::size_t row) const {
  double total = 0, vote = 0;
  for (std::size_t i = 0; i < stumps_.size(); ++i) {
    const double h = stumps_[i].predict(x, row) >= 0.5 ? 1.0 : -1.0;
    vote += alphas_[i] * h;
    total += alphas_[i];
  }
  return total > 0 ? sigmoid(vote / total) : 0.5;
}

BoostedModel::BoostedModel(ClassifierSpec spec, std::size_t width, double base, std::vector<Tree> trees,
                           std::vector<double> importance)
    : ClassifierModel(spec, width), base_(base), trees_(std::move(trees)), importance_(std::move(importance)) {}

double BoostedModel::margin(const Matrix& x, std::size_t row, std::size_t rounds) const {
  double f = base_;
  const std::size_t n = std::min(rounds, trees_.size());
  for (std::size_t i = 0; i < n; ++i) f += spec().hyper.learning_rate * trees_[i].predict(x, row);
  return f;
}

double BoostedModel::predict_row(const Matrix& x, std::size_t row) const {
  return sigmoid(margin(x, row, trees_.size()));
}

KnnModel::KnnModel(ClassifierSpec spec, Matrix train, std::vector<int> labels)
    : ClassifierModel(spec, train.cols()), train_(std::move(train)), labels_(std::move(labels)) {
  if (!train_.is_sparse()) return;
  const CsrMatrix& csr = train_.csr();
  norms_.resize(csr.rows);
  std::vector<std::size_t> counts(csr.cols + 1, 0);
  for (std::size_t r = 0; r < csr.rows; ++r) {
    double sq = 0;
    for (std::size_t k = csr.indptr[r]; k < csr.indptr[r + 1]; ++k) {
      sq += csr.values[k] * csr.values[k];
      ++counts[csr.indices[k] + 1];
    }
    norms_[r] = std::sqrt(sq);
  }
  std::partial_sum(counts.begin(), counts.end(), counts.begin());
  postptr_ = counts;
  post_rows_.resize(counts.back());
  post_values_.resize(counts.back());
  std::vector<std::size_t> cursor(counts.begin(), counts.end() - 1);
  for (std::size_t r = 0; r < csr.rows; ++r) {
    for (std::size_t k = csr.indptr[r]; k < csr.indptr[r + 1]; ++k) {
      const std::size_t slot = cursor[csr.indices[k]]++;
      post_rows_[slot] = static_cast<std::uint32_t>(r);
      post_values_[slot] = csr.values[k];
    }
  }
}

std::size_t KnnModel::neighbors() const {
  return std::min<std::size_t>(static_cast<std::size_t>(spec().hyper.k), labels_.size());
}

double KnnModel::predict_row(const Matrix& x, std::size_t row) const {
  if (x.is_sparse() != train_.is_sparse()) {
    throw ContractError("knn query storage (dense/sparse) differs from its training matrix");
  }
  return train_.is_sparse() ? predict_sparse(x, row) : predict_dense(x, row);
}

namespace {

// Votes among the k smallest (distance, index) pairs.
double vote(std::vector<std::pair<double, std::uint32_t>>& candidates, std::size_t k,
            const std::vector<int>& labels) {
  k = std::min(k, candidates.size());
  std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(k), candidates.end());
  std::size_t positive = 0;
  for (std::size_t i = 0; i < k; ++i) positive += static_cast<std::size_t>(labels[candidates[i].second]);
  return k ? static_cast<double>(positive) / static_cast<double>(k) : 0.5;
}

}  // namespace

double KnnModel::predict_dense(const Matrix& x, std::size_t row) const {
  thread_local std::vector<std::pair<double, std::uint32_t>> candidates;
  const auto query = x.dense_row(row);
  const std::size_t n = train_.rows();
  candidates.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto other = train_.dense_row(i);
    double sq = 0;
    for (std::size_t c = 0; c < query.size(); ++c) {
      const double d = query[c] - other[c];
      sq += d * d;
    }
    candidates[i] = {sq, static_cast<std::uint32_t>(i)};
  }
  return vote(candidates, neighbors(), labels_);
}

double KnnModel::predict_sparse(const Matrix& x, std::size_t row) const {
  thread_local std::vector<double> dots;
  thread_local std::vector<std::uint32_t> touched;
  thread_local std::vector<std::pair<double, std::uint32_t>> candidates;
  const std::size_t n = train_.rows();
  if (dots.size() != n) dots.assign(n, 0.0);
  touched.clear();
  const auto idx = x.row_indices(row);
  const auto val = x.row_values(row);
  double qsq = 0;
  for (std::size_t k = 0; k < idx.size(); ++k) {
    qsq += val[k] * val[k];
    if (idx[k] >= postptr_.size() - 1) continue;
    for (std::size_t p = postptr_[idx[k]]; p < postptr_[idx[k] + 1]; ++p) {
      const std::uint32_t r = post_rows_[p];
      if (dots[r] == 0.0) touched.push_back(r);
      dots[r] += val[k] * post_values_[p];
    }
  }
  const double qnorm = std::sqrt(qsq);
  const std::size_t k = neighbors();
  candidates.clear();
  std::sort(touched.begin(), touched.end());
  touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
  for (std::uint32_t r : touched) {
    const double denom = qnorm * norms_[r];
    const double sim = denom > 0 ? dots[r] / denom : 0.0;
    candidates.emplace_back(1.0 - sim, r);
    dots[r] = 0.0;
  }
  // Untouched rows all sit at distance 1; only the first k of them can win.
  std::size_t added = 0;
  auto next_touched = touched.begin();
  for (std::uint32_t r = 0; r < n && added < k; ++r) {
    while (next_touched != touched.end() && *next_touched < r) ++next_touched;
    if (next_touched != touched.end() && *next_touched == r) continue;
    candidates.emplace_back(1.0, r);
    ++added;
  }
  return vote(candidates, k, labels_);
}

}  // namespace detail

using namespace detail;

namespace {

void check_training_inputs(const ClassifierSpec& spec, const Matrix& x, std::span<const int> y) {
  spec.validate();
  if (x.rows() != y.size()) throw ContractError("feature rows and labels differ in length");
  if (x.rows() < 2) throw ContractError("training needs at least two rows");
  bool seen[2] = {false, false};
  for (int label : y) {
    if (label != 0 && label != 1) throw ContractError("labels must be 0 or 1");
    seen[label] = true;
  }
  if (!seen[0] || !seen[1]) throw ContractError("training labels must contain both classes");
  if (x.has_non_finite()) throw ContractError("training matrix contains non-finite values");
}

std::size_t feature_budget(const Hyperparameters& h, std::size_t width, bool forest) {
  if (h.max_features > 0) return std::min<std::size_t>(static_cast<std::size_t>(h.max_features), width);
  return forest ? sqrt_features(width) : 0;
}

std::unique_ptr<ClassifierModel> train_tree(const ClassifierSpec& spec, const Matrix& x,
                                            std::span<const int> y) {
  const ColumnStore columns = ColumnStore::build(x);
  const std::size_t n = x.rows();
  std::vector<double> w(n, 1.0), g(y.begin(), y.end()), h(n, 1.0);
  TreeParams params;
  params.criterion = Criterion::gini;
  params.max_depth = spec.hyper.max_depth;
  params.min_leaf_weight = spec.hyper.min_samples_leaf;
  params.max_features = feature_budget(spec.hyper, x.cols(), false);
  Rng rng(spec.hyper.seed);
  std::vector<double> importance(x.cols(), 0.0);
  Tree tree = grow_tree(columns, x, w, g, h, params, rng, &importance);
  return std::make_unique<TreeModel>(spec, x.cols(), std::move(tree), normalized(std::move(importance)));
}

std::unique_ptr<ClassifierModel> train_forest(const ClassifierSpec& spec, const Matrix& x,
                                              std::span<const int> y, bool extra) {
  const ColumnStore columns = ColumnStore::build(x);
  const std::size_t n = x.rows();
  TreeParams params;
  params.criterion = Criterion::gini;
  params.max_depth = spec.hyper.max_depth;
  params.min_leaf_weight = spec.hyper.min_samples_leaf;
  params.max_features = feature_budget(spec.hyper, x.cols(), true);
  params.random_thresholds = extra;
  Rng rng(spec.hyper.seed);
  std::vector<Tree> trees;
  std::vector<double> importance(x.cols(), 0.0);
  std::vector<double> w(n), g(n), h(n, 1.0);
  for (int t = 0; t < spec.hyper.n_estimators; ++t) {
    Rng tree_rng = rng.split();
    if (spec.hyper.bootstrap) {
      std::fill(w.begin(), w.end(), 0.0);
      for (std::size_t i = 0; i < n; ++i) w[tree_rng.below(n)] += 1.0;
    } else {
      std::fill(w.begin(), w.end(), 1.0);
    }
    for (std::size_t i = 0; i < n; ++i) g[i] = w[i] * y[i];
    std::vector<double> tree_importance(x.cols(), 0.0);
    trees.push_back(grow_tree(columns, x, w, g, h, params, tree_rng, &tree_importance));
    tree_importance = normalized(std::move(tree_importance));
    for (std::size_t c = 0; c < importance.size(); ++c) importance[c] += tree_importance[c];
  }
  return std::make_unique<ForestModel>(spec, x.cols(), std::move(trees), normalized(std::move(importance)));
}

std::unique_ptr<ClassifierModel> train_adaboost(const ClassifierSpec& spec, const Matrix& x,
                                                std::span<const int> y) {
  const ColumnStore columns = ColumnStore::build(x);
  const std::size_t n = x.rows();
  TreeParams params;
  params.criterion = Criterion::gini;
  params.max_depth = 1;
  params.min_leaf_weight = 0.0;
  Rng rng(spec.hyper.seed);
  std::vector<double> w(n, 1.0 / static_cast<double>(n)), g(n), h(n, 1.0);
  std::vector<Tree> stumps;
  std::vector<double> alphas;
  std::vector<double> importance(x.cols(), 0.0);
  for (int round = 0; round < spec.hyper.n_estimators; ++round) {
    for (std::size_t i = 0; i < n; ++i) g[i] = w[i] * y[i];
    Tree stump = grow_tree(columns, x, w, g, h, params, rng);
    std::vector<char> wrong(n);
    double err = 0, total = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const int label = stump.predict(x, i) >= 0.5 ? 1 : 0;
      wrong[i] = label != y[i];
      total += w[i];
      if (wrong[i]) err += w[i];
    }
    err /= total;
    if (err <= 0) {
      // A perfect stump decides alone.
      stumps.push_back(std::move(stump));
      alphas.push_back(1.0);
      break;
    }
    if (err >= 0.5) break;
    const double alpha = spec.hyper.learning_rate * std::log((1 - err) / err);
    if (stump.nodes[0].feature >= 0) importance[static_cast<std::size_t>(stump.nodes[0].feature)] += alpha;
    stumps.push_back(std::move(stump));
    alphas.push_back(alpha);
    double sum = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (wrong[i]) w[i] *= std::exp(alpha);
      sum += w[i];
    }
    for (double& v : w) v /= sum;
  }
  return std::make_unique<AdaBoostModel>(spec, x.cols(), std::move(stumps), std::move(alphas),
                                         normalized(std::move(importance)));
}

std::unique_ptr<ClassifierModel> train_boosted(const ClassifierSpec& spec, const Matrix& x,
                                               std::span<const int> y) {
  const bool newton = spec.kind == Kind::xgb;
  const ColumnStore columns = ColumnStore::build(x);
  const std::size_t n = x.rows();
  const double positive = static_cast<double>(std::count(y.begin(), y.end(), 1));
  const double prior = positive / static_cast<double>(n);
  const double base = std::log(prior / (1 - prior));

  TreeParams params;
  params.criterion = newton ? Criterion::newton : Criterion::squared;
  params.max_depth = spec.hyper.max_depth;
  params.min_leaf_weight = newton ? 0.0 : spec.hyper.min_samples_leaf;
  params.min_child_hessian = newton ? spec.hyper.min_child_weight : 0.0;
  params.lambda = spec.hyper.lambda;
  params.gamma = spec.hyper.gamma;
  params.max_features = feature_budget(spec.hyper, x.cols(), false);

  Rng rng(spec.hyper.seed);
  std::vector<double> f(n, base), w(n, 1.0), g(n), h(n);
  std::vector<Tree> trees;
  std::vector<double> importance(x.cols(), 0.0);
  for (int round = 0; round < spec.hyper.n_estimators; ++round) {
    if (spec.hyper.subsample < 1.0) {
      for (double& v : w) v = rng.bernoulli(spec.hyper.subsample) ? 1.0 : 0.0;
    }
    for (std::size_t i = 0; i < n; ++i) {
      const double p = sigmoid(f[i]);
      g[i] = newton ? p - y[i] : y[i] - p;
      h[i] = p * (1 - p);
    }
    Tree tree = grow_tree(columns, x, w, g, h, params, rng, &importance);
    parallel_for(n, [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) f[i] += spec.hyper.learning_rate * tree.predict(x, i);
    });
    trees.push_back(std::move(tree));
  }
  return std::make_unique<BoostedModel>(spec, x.cols(), base, std::move(trees),
                                        normalized(std::move(importance)));
}

}  // namespace

std::unique_ptr<ClassifierModel> train(const ClassifierSpec& spec, const Matrix& x, std::span<const int> y) {
  check_training_inputs(spec, x, y);
  switch (spec.kind) {
    case Kind::knn:
      return std::make_unique<KnnModel>(spec, x, std::vector<int>(y.begin(), y.end()));
    case Kind::decision_tree:
      return train_tree(spec, x, y);
    case Kind::random_forest:
      return train_forest(spec, x, y, false);
    case Kind::extra_trees:
      return train_forest(spec, x, y, true);
    case Kind::adaboost:
      return train_adaboost(spec, x, y);
    case Kind::gbm:
    case Kind::xgb:
      return train_boosted(spec, x, y);
  }
  throw ContractError("unsupported classifier kind");
}

std::unique_ptr<ClassifierModel> make_tree_model(Tree tree, std::size_t width) {
  for (const TreeNode& node : tree.nodes) {
    if (node.feature >= static_cast<int>(width)) throw ContractError("tree splits on a column beyond the width");
  }
  return std::make_unique<TreeModel>(ClassifierSpec::defaults(Kind::decision_tree), width, std::move(tree),
                                     std::vector<double>(width, 0.0));
}

std::vector<double> staged_margin(const ClassifierModel& model, const Matrix& x, std::size_t rounds) {
  const auto* boosted = dynamic_cast<const BoostedModel*>(&model);
  if (!boosted) throw ContractError("staged margins exist only for gbm and xgb models");
  if (x.cols() != model.width()) throw ContractError("matrix width does not match the model");
  std::vector<double> out(x.rows());
  for (std::size_t r = 0; r < x.rows(); ++r) out[r] = boosted->margin(x, r, rounds);
  return out;
}

}  // namespace dupliq::learn
