#include <algorithm>
#include <fstream>
#include <optional>
#include <set>
#include <unordered_set>

#include "dupliq/common.hpp"
#include "dupliq/corpus.hpp"
#include "dupliq/featmat.hpp"
#include "dupliq/textops.hpp"
#include "dupliq/tfidf.hpp"
#include "internal.hpp"

namespace dupliq::cli {

namespace {

void require(const std::string& value, const std::string& flag, const std::string& command) {
  if (value.empty()) throw ContractError(command + " needs " + flag);
}

corpus::PairTable load_table(const ExperimentConfig& c, const std::string& command) {
  require(c.data, "--data", command);
  return corpus::load_pairs(c.data);
}

}  // namespace

std::vector<std::string> corpus_words(const corpus::PairTable& table) {
  std::set<std::string> words;
  for (const auto& row : table.rows) {
    for (const auto* q : {&row.question1, &row.question2}) {
      for (auto& token : textops::tokenize(textops::normalize_text(*q))) words.insert(std::move(token));
    }
  }
  return {words.begin(), words.end()};
}

namespace {

nlohmann::json metrics_json(const learn::Metrics& m) {
  return {{"accuracy", m.accuracy}, {"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}, {"log_loss", m.log_loss}};
}

struct LoadedModel {
  std::unique_ptr<learn::ClassifierModel> model;
  std::vector<std::string> columns;
};

LoadedModel load_cli_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ContractError(path + ": " + e.what());
  }
  LoadedModel loaded{learn::model_from_json(doc), {}};
  if (doc.contains("columns")) loaded.columns = doc.at("columns").get<std::vector<std::string>>();
  return loaded;
}

Design design_for_model(const ExperimentConfig& c, const LoadedModel& loaded, const std::string& command) {
  require(c.features, "--features", command);
  Design d = load_design(c.features);
  if (!loaded.columns.empty() && !d.x.is_sparse()) d = select_columns(d, loaded.columns);
  return d;
}

std::vector<std::string> drop_list(const ExperimentConfig& c) {
  std::vector<std::string> drop = c.drop;
  if (c.drop_low_importance) {
    for (const auto& name : featmat::DropList::low_importance().names) {
      if (std::find(drop.begin(), drop.end(), name) == drop.end()) drop.push_back(name);
    }
  }
  return drop;
}

}  // namespace

nlohmann::json cmd_stats(const ExperimentConfig& c, std::ostream& out) {
  const corpus::PairTable table = load_table(c, "stats");
  const corpus::CorpusStats s = corpus::corpus_stats(table);
  out << "pairs            " << s.total_pairs << "\n"
      << "duplicates       " << s.positives << "\n"
      << "non-duplicates   " << s.negatives << "\n"
      << "sum len q1/q2    " << s.sum_len_q1 << " / " << s.sum_len_q2 << "\n"
      << "avg len q1/q2    " << fixed(s.avg_len_q1, 2) << " / " << fixed(s.avg_len_q2, 2) << "\n"
      << "max len q1/q2    " << s.max_len_q1 << " / " << s.max_len_q2 << "\n"
      << "short q1/q2      " << s.short_q1 << " / " << s.short_q2 << "\n"
      << "unique questions " << s.question_occurrence.size() << "\n";
  nlohmann::json histogram = nlohmann::json::array();
  for (const auto& [times, questions] : s.occurrence_histogram()) histogram.push_back({times, questions});
  return {{"total_pairs", s.total_pairs},
          {"positives", s.positives},
          {"negatives", s.negatives},
          {"sum_len_q1", s.sum_len_q1},
          {"sum_len_q2", s.sum_len_q2},
          {"avg_len_q1", s.avg_len_q1},
          {"avg_len_q2", s.avg_len_q2},
          {"max_len_q1", s.max_len_q1},
          {"max_len_q2", s.max_len_q2},
          {"short_q1", s.short_q1},
          {"short_q2", s.short_q2},
          {"unique_questions", s.question_occurrence.size()},
          {"occurrence_histogram", histogram}};
}

nlohmann::json cmd_clean(const ExperimentConfig& c, std::ostream& out) {
  require(c.out, "--out", "clean");
  const corpus::PairTable table = load_table(c, "clean");
  const corpus::PairTable cleaned = corpus::clean(table);
  corpus::save_pairs(cleaned, c.out);
  out << "kept " << cleaned.size() << " of " << table.size() << " pairs (removed " << table.size() - cleaned.size()
      << ")\n";
  return {{"input_rows", table.size()}, {"output_rows", cleaned.size()}, {"removed", table.size() - cleaned.size()}};
}

nlohmann::json cmd_split(const ExperimentConfig& c, std::ostream& out) {
  require(c.train_out, "--train-out", "split");
  require(c.test_out, "--test-out", "split");
  const corpus::PairTable table = load_table(c, "split");
  const corpus::SplitTables split = corpus::stratified_split(table, c.test_fraction, c.seed);
  corpus::save_pairs(split.train, c.train_out);
  corpus::save_pairs(split.test, c.test_out);
  out << "train " << split.train.size() << ", test " << split.test.size() << "\n";
  return {{"train_rows", split.train.size()}, {"test_rows", split.test.size()}};
}

nlohmann::json cmd_featurize(const ExperimentConfig& c, std::ostream& out) {
  require(c.out, "--out", "featurize");
  if (c.glove.empty() && c.w2v.empty()) throw ContractError("featurize needs word vectors: pass --glove <file> or --w2v <file>");
  const corpus::PairTable table = load_table(c, "featurize");
  const embed::EmbeddingTable vectors = load_embeddings_for(c, corpus_words(table), "featurize");
  featmat::FeatureMatrix m = featmat::extract_matrix(table, vectors);
  if (const auto drop = drop_list(c); !drop.empty()) m = featmat::drop_features(m, {drop});
  featmat::save_matrix(m, c.out);
  out << "wrote " << m.rows() << " x " << m.cols() << " features to " << c.out << "\n";
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"embedding_words", vectors.size()}, {"embedding_dim", vectors.dim()}};
}

tfidf::TfidfOptions tfidf_options(const ExperimentConfig& c) {
  tfidf::TfidfOptions o = tfidf::default_options(tfidf::parse_analyzer(c.tfidf.analyzer));
  o.ngram_min = c.tfidf.ngram_min;
  o.ngram_max = c.tfidf.ngram_max;
  o.max_features = c.tfidf.max_features;
  return o;
}

std::vector<std::string> tfidf_corpus(const corpus::PairTable& train) {
  std::set<std::string> docs;
  for (const auto& row : train.rows) {
    docs.insert(row.question1);
    docs.insert(row.question2);
  }
  return {docs.begin(), docs.end()};
}

learn::CsrMatrix pair_matrix(const tfidf::TfidfModel& model, const corpus::PairTable& table) {
  learn::CsrMatrix csr;
  csr.cols = 2 * model.size();
  for (const auto& row : table.rows) csr.add_row(model.pair_vector(row.question1, row.question2).entries);
  return csr;
}

nlohmann::json cmd_tfidf_fit(const ExperimentConfig& c, std::ostream& out) {
  require(c.out, "--out", "tfidf-fit");
  const corpus::PairTable table = load_table(c, "tfidf-fit");
  const auto docs = tfidf_corpus(table);
  const tfidf::TfidfModel model = tfidf::fit(docs, tfidf_options(c));
  tfidf::save_model(model, c.out);
  out << "fitted " << model.size() << " " << tfidf::analyzer_name(model.options().analyzer) << " terms on "
      << docs.size() << " questions\n";
  return {{"documents", docs.size()}, {"terms", model.size()}};
}

nlohmann::json cmd_tfidf_featurize(const ExperimentConfig& c, std::ostream& out) {
  require(c.out, "--out", "tfidf-featurize");
  require(c.tfidf_model, "--tfidf-model", "tfidf-featurize");
  const corpus::PairTable table = load_table(c, "tfidf-featurize");
  const tfidf::TfidfModel model = tfidf::load_model(c.tfidf_model);
  const learn::CsrMatrix csr = pair_matrix(model, table);
  learn::save_svmlight(csr, table.labels(), c.out);
  out << "wrote " << csr.rows << " pair vectors of width " << csr.cols << " to " << c.out << "\n";
  return {{"rows", csr.rows}, {"cols", csr.cols}, {"nonzeros", csr.values.size()}};
}

nlohmann::json cmd_train(const ExperimentConfig& c, std::ostream& out) {
  require(c.features, "--features", "train");
  require(c.out, "--out", "train");
  const learn::ClassifierSpec spec = resolve_spec(c.model, c.hyperparameters, c.seed);
  const auto drop = drop_list(c);
  const Design d = load_design(c.features, drop);
  const auto model = learn::train(spec, d.x, d.y);

  std::string training_data;
  if (spec.kind == learn::Kind::knn) {
    if (d.x.is_sparse()) {
      training_data = std::filesystem::absolute(c.features).string();
    } else {
      training_data = std::filesystem::absolute(c.out + ".train.svm").string();
      learn::save_svmlight(to_csr(d.x), d.y, training_data);
    }
  }
  nlohmann::json doc = learn::model_to_json(*model, training_data);
  doc["columns"] = d.names;
  std::ofstream file(c.out, std::ios::binary);
  if (!file) throw IoError("cannot write " + c.out);
  file << doc.dump() << '\n';
  if (!file) throw IoError("failed writing " + c.out);

  const learn::Metrics m = learn::evaluate(*model, d.x, d.y);
  out << learn::kind_label(spec.kind) << ": train accuracy " << fixed(m.accuracy) << ", f1 " << fixed(m.f1) << "\n";
  return {{"spec", learn::spec_to_json(spec)}, {"rows", d.x.rows()}, {"cols", d.x.cols()}, {"train_metrics", metrics_json(m)}};
}

nlohmann::json cmd_eval(const ExperimentConfig& c, std::ostream& out) {
  require(c.model_file, "--model-file", "eval");
  const LoadedModel loaded = load_cli_model(c.model_file);
  const Design d = design_for_model(c, loaded, "eval");
  const learn::Metrics m = learn::evaluate(*loaded.model, d.x, d.y);
  out << pad("Classifier", 22) << "Accuracy  Precision Recall    F1        LogLoss\n"
      << pad(std::string(learn::kind_label(loaded.model->spec().kind)), 22) << pad(fixed(m.accuracy), 10)
      << pad(fixed(m.precision), 10) << pad(fixed(m.recall), 10) << pad(fixed(m.f1), 10) << fixed(m.log_loss) << "\n";
  return {{"kind", learn::kind_name(loaded.model->spec().kind)}, {"rows", d.x.rows()}, {"metrics", metrics_json(m)}};
}

nlohmann::json cmd_importance(const ExperimentConfig& c, std::ostream& out) {
  require(c.model_file, "--model-file", "importance");
  const LoadedModel loaded = load_cli_model(c.model_file);
  const Design d = design_for_model(c, loaded, "importance");
  learn::ImportanceOptions options;
  options.force_permutation = c.permutation;
  options.repeats = c.repeats;
  options.seed = c.seed;
  const learn::ImportanceReport report = learn::feature_importance(*loaded.model, d.x, d.y, d.names, options);
  const bool native = report.method == learn::ImportanceMethod::native_gain;
  out << "method: " << (native ? "native_gain" : "permutation") << "\n";
  nlohmann::json ranked = nlohmann::json::array();
  for (const auto& e : report.ranked) {
    out << pad(e.feature, 28) << fixed(e.weight, 6) << "\n";
    ranked.push_back({{"feature", e.feature}, {"weight", e.weight}});
  }
  return {{"method", native ? "native_gain" : "permutation"}, {"ranked", ranked}};
}

nlohmann::json cmd_grid(const ExperimentConfig& c, std::ostream& out) {
  require(c.grid_file, "--spec", "grid");
  require(c.features, "--features", "grid");
  std::ifstream in(c.grid_file, std::ios::binary);
  if (!in) throw IoError("cannot open " + c.grid_file);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ContractError(c.grid_file + ": " + e.what());
  }
  const nlohmann::json& items = doc.is_array() ? doc : doc.at("specs");
  std::vector<learn::ClassifierSpec> grid;
  for (nlohmann::json item : items) {
    if (!item.contains("hyperparameters") || !item["hyperparameters"].contains("seed")) {
      item["hyperparameters"]["seed"] = c.seed;
    }
    grid.push_back(learn::spec_from_json(item));
  }
  const Design d = load_design(c.features, drop_list(c));
  const learn::GridResult result = learn::grid_search(grid, d.x, d.y, c.val_fraction, c.seed);
  nlohmann::json table = nlohmann::json::array();
  for (std::size_t i = 0; i < result.table.size(); ++i) {
    const auto& e = result.table[i];
    out << pad("#" + std::to_string(i), 6) << pad(std::string(learn::kind_name(e.spec.kind)), 16) << fixed(e.accuracy)
        << "  " << learn::spec_to_json(e.spec)["hyperparameters"].dump() << "\n";
    table.push_back({{"spec", learn::spec_to_json(e.spec)}, {"accuracy", e.accuracy}});
  }
  out << "best: " << learn::spec_to_json(result.best).dump() << "\n";
  return {{"best", learn::spec_to_json(result.best)}, {"table", table}};
}

namespace {

neural::ArchDims dims_for(const ExperimentConfig& c) {
  if (!c.nn.toy) return c.nn.dims;
  neural::ArchDims toy = neural::ArchDims::toy();
  toy.head_blocks = c.nn.dims.head_blocks;
  return toy;
}

}  // namespace

nlohmann::json cmd_nn_build(const ExperimentConfig& c, std::ostream& out) {
  const neural::ArchDims dims = dims_for(c);
  const std::size_t vocab = c.nn.vocab_size ? c.nn.vocab_size : (c.nn.toy ? 50 : 100000);
  const std::size_t glove_dim = c.nn.glove_dim ? c.nn.glove_dim : (c.nn.toy ? 8 : 300);
  neural::Network net = neural::build_architecture(c.nn.arch, vocab, glove_dim, dims, c.seed);
  const nlohmann::json summary = net.describe();
  out << "architecture " << c.nn.arch << ": " << net.branch_count() << " branches over " << net.input_count()
      << " inputs of length " << net.sequence_length() << ", merge width " << net.merge_width() << "\n";
  for (std::size_t b = 0; b < summary["branches"].size(); ++b) {
    out << "  branch " << b << " (q" << summary["branches"][b]["input"].get<int>() + 1 << "):";
    for (const auto& layer : summary["branches"][b]["layers"]) out << " " << layer["kind"].get<std::string>();
    out << "\n";
  }
  out << "  head:";
  for (const auto& layer : summary["head"]) out << " " << layer["kind"].get<std::string>();
  out << "\n  parameters " << net.parameter_count() << " (trainable " << net.trainable_parameter_count() << ")\n";
  return {{"architecture", c.nn.arch}, {"vocab_size", vocab}, {"glove_dim", glove_dim}, {"network", summary}};
}

nlohmann::json cmd_nn_train(const ExperimentConfig& c, std::ostream& out) {
  neural::TrainConfig train = c.nn.train;
  train.seed = c.seed;
  std::vector<neural::Tensor> inputs;
  std::vector<int> labels;
  std::optional<neural::Network> net;
  nlohmann::json data_info;
  nlohmann::json vocab_json;
  if (c.nn.toy) {
    const neural::ArchDims dims = dims_for(c);
    neural::ToyPairs toy = neural::separable_toy_pairs(c.nn.toy_pairs, dims.seq_len, 50, c.seed);
    net.emplace(neural::build_architecture(c.nn.arch, toy.vocab_size, 8, dims, c.seed));
    inputs = std::move(toy.inputs);
    labels = std::move(toy.labels);
    data_info = {{"toy_pairs", c.nn.toy_pairs}, {"vocab_size", toy.vocab_size}};
  } else {
    const corpus::PairTable table = load_table(c, "nn-train");
    std::vector<std::string> q1, q2, texts;
    for (const auto& row : table.rows) {
      q1.push_back(row.question1);
      q2.push_back(row.question2);
      labels.push_back(row.is_duplicate);
    }
    texts = q1;
    texts.insert(texts.end(), q2.begin(), q2.end());
    const neural::Vocabulary vocab = neural::Vocabulary::build(texts, c.nn.max_words);
    std::optional<embed::EmbeddingTable> glove;
    if (c.nn.arch >= 2) {
      std::vector<std::string> words;
      for (std::size_t i = 1; i <= vocab.size(); ++i) words.push_back(vocab.word(i));
      glove = load_embeddings_for(c, words, "architecture " + std::to_string(c.nn.arch));
    }
    net.emplace(neural::build_architecture(c.nn.arch, vocab, glove ? &*glove : nullptr, c.nn.dims, c.seed));
    inputs.push_back(vocab.encode_batch(q1, c.nn.dims.seq_len));
    inputs.push_back(vocab.encode_batch(q2, c.nn.dims.seq_len));
    data_info = {{"pairs", table.size()}, {"vocab_size", vocab.index_space()}};
    vocab_json = vocab.to_json();
  }
  const neural::TrainingHistory history =
      neural::train_network(*net, inputs, labels, train, [&](const neural::EpochStats& e) {
        out << "epoch " << e.epoch << "  loss " << fixed(e.loss, 6) << "  accuracy " << fixed(e.accuracy) << "\n";
      });
  const std::vector<double> p = net->forward(inputs, neural::Mode::infer);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < p.size(); ++i) correct += (p[i] >= 0.5 ? 1 : 0) == labels[i];
  const double accuracy = static_cast<double>(correct) / static_cast<double>(labels.size());
  out << "final train accuracy (inference mode) " << fixed(accuracy) << "\n";
  if (!c.out.empty()) {
    neural::save_weights(*net, c.out, {{"architecture", c.nn.arch}, {"dims", dims_for(c).to_json()}, {"seed", c.seed}});
    if (!vocab_json.is_null()) {
      std::ofstream vf(c.out + ".vocab.json", std::ios::binary);
      if (!vf) throw IoError("cannot write " + c.out + ".vocab.json");
      vf << vocab_json.dump() << '\n';
    }
  }
  nlohmann::json epochs = nlohmann::json::array();
  for (const auto& e : history.epochs) epochs.push_back({{"epoch", e.epoch}, {"loss", e.loss}, {"accuracy", e.accuracy}});
  return {{"architecture", c.nn.arch}, {"data", data_info}, {"epochs", epochs}, {"final_accuracy", accuracy}};
}

nlohmann::json cmd_nn_gradcheck(const ExperimentConfig& c, std::ostream& out) {
  constexpr double kTolerance = 1e-4;
  constexpr double kJitter = 0.5;
  neural::ArchDims dims = neural::ArchDims::toy();
  dims.seq_len = 4;
  dims.embed_dim = 3;
  dims.units = 3;
  dims.conv_filters = 3;
  dims.head_blocks = c.nn.dims.head_blocks > 0 ? c.nn.dims.head_blocks : 2;
  neural::Network net = neural::build_architecture(c.nn.arch, 12, 3, dims, c.seed);
  const neural::ToyPairs toy = neural::separable_toy_pairs(8, dims.seq_len, 12, c.seed + 1, false);
  neural::GradCheckOptions options;
  options.seed = c.seed;
  options.jitter = kJitter;
  const neural::GradCheckReport report = neural::gradient_check(net, toy.inputs, toy.labels, options);
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : report.entries) {
    out << pad(e.parameter, 24) << pad(std::to_string(e.checked), 6) << pad(std::to_string(e.skipped), 6)
        << e.max_rel_error << "\n";
    entries.push_back({{"parameter", e.parameter},
                       {"checked", e.checked},
                       {"skipped", e.skipped},
                       {"max_rel_error", e.max_rel_error}});
  }
  const bool pass = report.max_rel_error <= kTolerance;
  out << "max relative error " << report.max_rel_error << (pass ? " (ok)" : " (FAIL)") << "\n";
  return {{"architecture", c.nn.arch}, {"max_rel_error", report.max_rel_error}, {"tolerance", kTolerance},
          {"pass", pass}, {"entries", entries}};
}

}  // namespace dupliq::cli
