#include <map>

#include "dupliq/common.hpp"
#include "dupliq/corpus.hpp"
#include "dupliq/featmat.hpp"
#include "internal.hpp"

namespace dupliq::cli {

namespace {

using learn::Kind;

struct Reference {
  double accuracy;
  double f1;
};

// Published full-data scores used as the reference column.
const std::map<Kind, Reference> kBaseline = {
    {Kind::knn, {0.7275, 0.7031}},         {Kind::adaboost, {0.7041, 0.6936}},
    {Kind::xgb, {0.7417, 0.7326}},         {Kind::gbm, {0.7271, 0.7176}},
    {Kind::decision_tree, {0.7054, 0.6992}}, {Kind::random_forest, {0.7099, 0.7016}},
    {Kind::extra_trees, {0.7039, 0.6849}},
};

const std::map<Kind, Reference> kReduced = {
    {Kind::knn, {0.7311, 0.7076}},         {Kind::adaboost, {0.7048, 0.6938}},
    {Kind::xgb, {0.7431, 0.7349}},         {Kind::gbm, {0.7289, 0.7196}},
    {Kind::decision_tree, {0.7054, 0.6992}}, {Kind::random_forest, {0.7085, 0.7021}},
    {Kind::extra_trees, {0.7069, 0.6914}},
};

const std::map<Kind, Reference> kWordTfidf = {
    {Kind::knn, {0.7513, 0.7359}},         {Kind::adaboost, {0.6883, 0.6076}},
    {Kind::xgb, {0.7881, 0.7596}},         {Kind::gbm, {0.6756, 0.5339}},
    {Kind::decision_tree, {0.6677, 0.5651}}, {Kind::random_forest, {0.6284, 0.3866}},
    {Kind::extra_trees, {0.6281, 0.3864}},
};

const std::map<Kind, Reference> kCharTfidf = {
    {Kind::knn, {0.7845, 0.7543}},         {Kind::adaboost, {0.6871, 0.6201}},
    {Kind::xgb, {0.8244, 0.8044}},         {Kind::gbm, {0.6951, 0.6009}},
    {Kind::decision_tree, {0.6672, 0.5767}}, {Kind::random_forest, {0.6484, 0.4066}},
    {Kind::extra_trees, {0.6581, 0.4059}},
};

struct Prepared {
  corpus::SplitTables split;
  nlohmann::json info;
};

Prepared prepare(const ExperimentConfig& c) {
  if (c.data.empty()) throw ContractError("reproduce needs --data <quora tsv>");
  const corpus::PairTable raw = corpus::load_pairs(c.data);
  corpus::PairTable table = corpus::clean(raw);
  const std::size_t cleaned = table.size();
  if (c.sample > 0 && c.sample < table.size()) table = corpus::stratified_sample(table, c.sample, c.seed);
  Prepared p{corpus::stratified_split(table, c.test_fraction, c.seed), {}};
  p.info = {{"raw_rows", raw.size()},
            {"cleaned_rows", cleaned},
            {"sampled_rows", table.size()},
            {"train_rows", p.split.train.size()},
            {"test_rows", p.split.test.size()}};
  return p;
}

std::vector<Kind> kinds_for(const ExperimentConfig& c) {
  std::vector<Kind> kinds;
  if (c.models.empty()) return {std::begin(learn::kAllKinds), std::end(learn::kAllKinds)};
  for (const std::string& name : c.models) kinds.push_back(learn::parse_kind(name));
  return kinds;
}

struct Scored {
  Kind kind;
  learn::Metrics metrics;
};

std::vector<Scored> score_all(const ExperimentConfig& c, const std::vector<Kind>& kinds, const learn::Matrix& train_x,
                              const std::vector<int>& train_y, const learn::Matrix& test_x,
                              const std::vector<int>& test_y, std::ostream& log) {
  std::vector<Scored> out;
  for (Kind kind : kinds) {
    log << "  training " << learn::kind_name(kind) << " ..." << std::endl;
    const auto spec = resolve_spec(std::string(learn::kind_name(kind)), c.hyperparameters, c.seed);
    const auto model = learn::train(spec, train_x, train_y);
    out.push_back({kind, learn::evaluate(*model, test_x, test_y)});
  }
  return out;
}

learn::Matrix dense_of(const featmat::FeatureMatrix& m) { return learn::Matrix::dense(m.rows(), m.cols(), m.values()); }

nlohmann::json row_json(const Scored& s, const std::map<Kind, Reference>& refs) {
  const Reference& r = refs.at(s.kind);
  return {{"kind", learn::kind_name(s.kind)},
          {"label", learn::kind_label(s.kind)},
          {"accuracy", s.metrics.accuracy},
          {"f1", s.metrics.f1},
          {"precision", s.metrics.precision},
          {"recall", s.metrics.recall},
          {"log_loss", s.metrics.log_loss},
          {"reference_accuracy", r.accuracy},
          {"reference_f1", r.f1}};
}

nlohmann::json feature_table(const std::string& table, const ExperimentConfig& c, std::ostream& out) {
  const Prepared p = prepare(c);
  corpus::PairTable both = p.split.train;
  both.rows.insert(both.rows.end(), p.split.test.rows.begin(), p.split.test.rows.end());
  const embed::EmbeddingTable vectors = load_embeddings_for(c, corpus_words(both), "reproduce " + table);
  out << "extracting features for " << both.size() << " pairs" << std::endl;
  const featmat::FeatureMatrix train_m = featmat::extract_matrix(p.split.train, vectors);
  const featmat::FeatureMatrix test_m = featmat::extract_matrix(p.split.test, vectors);
  const auto kinds = kinds_for(c);

  const auto baseline = score_all(c, kinds, dense_of(train_m), train_m.labels(), dense_of(test_m), test_m.labels(), out);
  nlohmann::json result = {{"table", table}, {"data", p.info}};

  if (table == "table5") {
    out << "\n" << pad("Classifier", 22) << pad("Accuracy", 10) << pad("F1", 10) << pad("RefAcc", 10) << "RefF1\n";
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& s : baseline) {
      const Reference& r = kBaseline.at(s.kind);
      out << pad(std::string(learn::kind_label(s.kind)), 22) << pad(fixed(s.metrics.accuracy), 10)
          << pad(fixed(s.metrics.f1), 10) << pad(fixed(r.accuracy), 10) << fixed(r.f1) << "\n";
      rows.push_back(row_json(s, kBaseline));
    }
    result["features"] = train_m.cols();
    result["rows"] = rows;
    return result;
  }

  const featmat::DropList drop = featmat::DropList::low_importance();
  const featmat::FeatureMatrix train_r = featmat::drop_features(train_m, drop);
  const featmat::FeatureMatrix test_r = featmat::drop_features(test_m, drop);
  const auto reduced = score_all(c, kinds, dense_of(train_r), train_r.labels(), dense_of(test_r), test_r.labels(), out);
  out << "\n" << pad("Classifier", 22) << pad("Acc(all)", 10) << pad("Acc", 10) << pad("Delta", 10) << pad("F1", 10)
      << pad("RefAcc", 10) << "RefF1\n";
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < reduced.size(); ++i) {
    const auto& s = reduced[i];
    const Reference& r = kReduced.at(s.kind);
    const double delta = s.metrics.accuracy - baseline[i].metrics.accuracy;
    out << pad(std::string(learn::kind_label(s.kind)), 22) << pad(fixed(baseline[i].metrics.accuracy), 10)
        << pad(fixed(s.metrics.accuracy), 10) << pad(fixed(delta), 10) << pad(fixed(s.metrics.f1), 10)
        << pad(fixed(r.accuracy), 10) << fixed(r.f1) << "\n";
    nlohmann::json row = row_json(s, kReduced);
    row["baseline_accuracy"] = baseline[i].metrics.accuracy;
    row["baseline_f1"] = baseline[i].metrics.f1;
    row["accuracy_delta"] = delta;
    rows.push_back(row);
  }
  result["dropped"] = drop.names;
  result["features"] = train_r.cols();
  result["rows"] = rows;
  return result;
}

nlohmann::json tfidf_table(const ExperimentConfig& c, std::ostream& out) {
  const Prepared p = prepare(c);
  const auto kinds = kinds_for(c);
  const auto docs = tfidf_corpus(p.split.train);
  std::map<std::string, std::vector<Scored>> scored;
  nlohmann::json vocab = nlohmann::json::object();
  for (const std::string analyzer : {"word", "char"}) {
    ExperimentConfig local = c;
    local.tfidf.analyzer = analyzer;
    if (analyzer == "word") {
      local.tfidf.ngram_min = 1;
      local.tfidf.ngram_max = 1;
    }
    const tfidf::TfidfModel model = tfidf::fit(docs, tfidf_options(local));
    out << analyzer << " tf-idf: " << model.size() << " terms" << std::endl;
    vocab[analyzer] = {{"terms", model.size()}, {"ngram_min", model.options().ngram_min}, {"ngram_max", model.options().ngram_max}};
    const learn::Matrix train_x = learn::Matrix::sparse(pair_matrix(model, p.split.train));
    const learn::Matrix test_x = learn::Matrix::sparse(pair_matrix(model, p.split.test));
    scored[analyzer] = score_all(c, kinds, train_x, p.split.train.labels(), test_x, p.split.test.labels(), out);
  }
  out << "\n" << pad("Classifier", 22) << pad("WordAcc", 10) << pad("WordF1", 10) << pad("CharAcc", 10)
      << pad("CharF1", 10) << pad("RefWord", 10) << "RefChar\n";
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < kinds.size(); ++i) {
    const auto& w = scored["word"][i];
    const auto& ch = scored["char"][i];
    out << pad(std::string(learn::kind_label(w.kind)), 22) << pad(fixed(w.metrics.accuracy), 10)
        << pad(fixed(w.metrics.f1), 10) << pad(fixed(ch.metrics.accuracy), 10) << pad(fixed(ch.metrics.f1), 10)
        << pad(fixed(kWordTfidf.at(w.kind).accuracy), 10) << fixed(kCharTfidf.at(w.kind).accuracy) << "\n";
    rows.push_back({{"kind", learn::kind_name(w.kind)},
                    {"label", learn::kind_label(w.kind)},
                    {"word", row_json(w, kWordTfidf)},
                    {"char", row_json(ch, kCharTfidf)}});
  }
  return {{"table", "table7"}, {"data", p.info}, {"tfidf", vocab}, {"rows", rows}};
}

}  // namespace

nlohmann::json cmd_reproduce(const std::string& table, const ExperimentConfig& c, std::ostream& out) {
  if (table == "table5" || table == "table6") return feature_table(table, c, out);
  if (table == "table7") return tfidf_table(c, out);
  throw ContractError("unknown table '" + table + "' (expected table5, table6 or table7)");
}

}  // namespace dupliq::cli
