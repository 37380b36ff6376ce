#include <algorithm>
#include <cstdio>
#include <fstream>
#include <memory>
#include <unordered_set>

#include "dupliq/common.hpp"
#include "dupliq/featmat.hpp"
#include "dupliq/textops.hpp"
#include "internal.hpp"

#ifndef DUPLIQ_VERSION
#define DUPLIQ_VERSION "unknown"
#endif

namespace dupliq::cli {

namespace {

constexpr int kConfigVersion = 1;

template <typename T>
void read(const nlohmann::json& doc, const char* key, T& field) {
  if (doc.contains(key)) field = doc.at(key).get<T>();
}

}  // namespace

nlohmann::json ExperimentConfig::to_json() const {
  const auto& t = nn.train;
  return {
      {"version", kConfigVersion},
      {"paths",
       {{"data", data},
        {"glove", glove},
        {"w2v", w2v},
        {"features", features},
        {"model_file", model_file},
        {"tfidf_model", tfidf_model},
        {"grid_file", grid_file},
        {"out", out},
        {"train_out", train_out},
        {"test_out", test_out},
        {"report_dir", report_dir}}},
      {"split", {{"test_fraction", test_fraction}, {"seed", seed}, {"sample", sample}}},
      {"features", {{"drop", drop}, {"drop_low_importance", drop_low_importance}}},
      {"classifier",
       {{"model", model},
        {"models", models},
        {"hyperparameters", hyperparameters},
        {"permutation", permutation},
        {"repeats", repeats},
        {"val_fraction", val_fraction}}},
      {"tfidf",
       {{"analyzer", tfidf.analyzer},
        {"ngram_min", tfidf.ngram_min},
        {"ngram_max", tfidf.ngram_max},
        {"max_features", tfidf.max_features}}},
      {"nn",
       {{"arch", nn.arch},
        {"toy", nn.toy},
        {"toy_pairs", nn.toy_pairs},
        {"vocab_size", nn.vocab_size},
        {"glove_dim", nn.glove_dim},
        {"max_words", nn.max_words},
        {"dims", nn.dims.to_json()},
        {"train",
         {{"batch_size", t.batch_size},
          {"epochs", t.epochs},
          {"learning_rate", t.learning_rate},
          {"beta1", t.beta1},
          {"beta2", t.beta2},
          {"epsilon", t.epsilon},
          {"seed", t.seed}}}}},
  };
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& doc) {
  ExperimentConfig c;
  try {
    if (doc.value("version", kConfigVersion) != kConfigVersion) {
      throw ContractError("unsupported config version " + doc.at("version").dump());
    }
    if (doc.contains("paths")) {
      const auto& p = doc.at("paths");
      read(p, "data", c.data);
      read(p, "glove", c.glove);
      read(p, "w2v", c.w2v);
      read(p, "features", c.features);
      read(p, "model_file", c.model_file);
      read(p, "tfidf_model", c.tfidf_model);
      read(p, "grid_file", c.grid_file);
      read(p, "out", c.out);
      read(p, "train_out", c.train_out);
      read(p, "test_out", c.test_out);
      read(p, "report_dir", c.report_dir);
    }
    if (doc.contains("split")) {
      const auto& s = doc.at("split");
      read(s, "test_fraction", c.test_fraction);
      read(s, "seed", c.seed);
      read(s, "sample", c.sample);
    }
    if (doc.contains("features")) {
      read(doc.at("features"), "drop", c.drop);
      read(doc.at("features"), "drop_low_importance", c.drop_low_importance);
    }
    if (doc.contains("classifier")) {
      const auto& k = doc.at("classifier");
      read(k, "model", c.model);
      read(k, "models", c.models);
      read(k, "hyperparameters", c.hyperparameters);
      read(k, "permutation", c.permutation);
      read(k, "repeats", c.repeats);
      read(k, "val_fraction", c.val_fraction);
    }
    if (doc.contains("tfidf")) {
      const auto& t = doc.at("tfidf");
      read(t, "analyzer", c.tfidf.analyzer);
      read(t, "ngram_min", c.tfidf.ngram_min);
      read(t, "ngram_max", c.tfidf.ngram_max);
      read(t, "max_features", c.tfidf.max_features);
    }
    if (doc.contains("nn")) {
      const auto& n = doc.at("nn");
      read(n, "arch", c.nn.arch);
      read(n, "toy", c.nn.toy);
      read(n, "toy_pairs", c.nn.toy_pairs);
      read(n, "vocab_size", c.nn.vocab_size);
      read(n, "glove_dim", c.nn.glove_dim);
      read(n, "max_words", c.nn.max_words);
      if (n.contains("dims")) c.nn.dims = neural::ArchDims::from_json(n.at("dims"));
      if (n.contains("train")) {
        const auto& t = n.at("train");
        read(t, "batch_size", c.nn.train.batch_size);
        read(t, "epochs", c.nn.train.epochs);
        read(t, "learning_rate", c.nn.train.learning_rate);
        read(t, "beta1", c.nn.train.beta1);
        read(t, "beta2", c.nn.train.beta2);
        read(t, "epsilon", c.nn.train.epsilon);
        read(t, "seed", c.nn.train.seed);
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ContractError(std::string("malformed config: ") + e.what());
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ContractError(path + ": " + e.what());
  }
  return ExperimentConfig::from_json(doc);
}

std::string version_string() { return DUPLIQ_VERSION; }

nlohmann::json make_report(const std::string& command, const ExperimentConfig& config, const nlohmann::json& result) {
  return {{"command", command}, {"version", version_string()}, {"config", config.to_json()}, {"result", result}};
}

void write_report(const ExperimentConfig& config, const std::string& name, const nlohmann::json& report) {
  std::error_code ec;
  std::filesystem::create_directories(config.report_dir, ec);
  const std::filesystem::path path = std::filesystem::path(config.report_dir) / (name + ".json");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write report " + path.string());
  out << report.dump(2) << '\n';
  if (!out) throw IoError("failed writing report " + path.string());
}

embed::EmbeddingTable load_embeddings_for(const ExperimentConfig& config, const std::vector<std::string>& vocabulary,
                                          const std::string& purpose) {
  if (config.glove.empty() && config.w2v.empty()) {
    throw ContractError(purpose + " needs word vectors: pass --glove <file> or --w2v <file>");
  }
  if (!config.glove.empty() && !config.w2v.empty()) throw ContractError("pass only one of --glove and --w2v");
  embed::WordFilter keep;
  std::shared_ptr<std::unordered_set<std::string>> words;
  if (!vocabulary.empty()) {
    words = std::make_shared<std::unordered_set<std::string>>(vocabulary.begin(), vocabulary.end());
    keep = [words](std::string_view w) { return words->count(std::string(w)) > 0; };
  }
  if (!config.glove.empty()) return embed::load_glove_text(config.glove, keep);
  return embed::load_word2vec_binary(config.w2v, keep);
}

namespace {

bool is_svmlight(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::string first;
  std::getline(in, first);
  return first.rfind("# dim ", 0) == 0;
}

}  // namespace

learn::CsrMatrix to_csr(const learn::Matrix& x) {
  if (x.is_sparse()) return x.csr();
  learn::CsrMatrix csr;
  csr.cols = x.cols();
  std::vector<std::pair<std::uint32_t, double>> entries;
  for (std::size_t r = 0; r < x.rows(); ++r) {
    entries.clear();
    x.for_each_nonzero(r, [&](std::uint32_t c, double v) { entries.emplace_back(c, v); });
    csr.add_row(entries);
  }
  return csr;
}

Design load_design(const std::string& path, const std::vector<std::string>& drop) {
  Design d;
  if (is_svmlight(path)) {
    if (!drop.empty()) throw ContractError("column drops apply to feature CSV files, not svmlight");
    auto [csr, labels] = learn::load_svmlight(path);
    for (std::size_t c = 0; c < csr.cols; ++c) d.names.push_back("f" + std::to_string(c));
    d.x = learn::Matrix::sparse(std::move(csr));
    d.y = std::move(labels);
    return d;
  }
  featmat::FeatureMatrix m = featmat::load_matrix(path);
  if (!drop.empty()) m = featmat::drop_features(m, featmat::DropList{drop});
  d.names = m.column_names();
  d.y = m.labels();
  d.x = learn::Matrix::dense(m.rows(), m.cols(), m.values());
  return d;
}

Design select_columns(const Design& design, const std::vector<std::string>& names) {
  if (names == design.names) return design;
  if (design.x.is_sparse()) throw ContractError("model columns do not match the svmlight width");
  std::vector<std::size_t> picks;
  for (const std::string& name : names) {
    const auto it = std::find(design.names.begin(), design.names.end(), name);
    if (it == design.names.end()) throw ContractError("feature file lacks column '" + name + "'");
    picks.push_back(static_cast<std::size_t>(it - design.names.begin()));
  }
  std::vector<double> values;
  values.reserve(design.x.rows() * picks.size());
  for (std::size_t r = 0; r < design.x.rows(); ++r) {
    for (std::size_t c : picks) values.push_back(design.x.at(r, c));
  }
  return {learn::Matrix::dense(design.x.rows(), picks.size(), std::move(values)), design.y, names};
}

learn::ClassifierSpec resolve_spec(const std::string& kind, const std::vector<std::string>& overrides,
                                   std::uint64_t seed) {
  nlohmann::json hyper = {{"seed", seed}};
  for (const std::string& item : overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw ContractError("hyperparameter override '" + item + "' is not key=value");
    const std::string key = item.substr(0, eq);
    const std::string value = item.substr(eq + 1);
    if (value == "true" || value == "false") {
      hyper[key] = value == "true";
    } else if (value.find_first_of(".eE") == std::string::npos) {
      hyper[key] = parse_integer(value, key);
    } else {
      hyper[key] = parse_double(value, key);
    }
  }
  return learn::spec_from_json({{"kind", kind}, {"hyperparameters", hyper}});
}

std::string fixed(double value, int digits) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.*f", digits, value);
  return buffer;
}

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

}  // namespace dupliq::cli
