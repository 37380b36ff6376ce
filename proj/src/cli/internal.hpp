#pragma once

#include <cstdint>
#include <nlohmann/json.hpp>
#include <ostream>
#include <string>
#include <vector>

#include "dupliq/corpus.hpp"
#include "dupliq/embed.hpp"
#include "dupliq/learn.hpp"
#include "dupliq/neural.hpp"
#include "dupliq/tfidf.hpp"

namespace dupliq::cli {

struct TfidfSettings {
  std::string analyzer = "char";
  int ngram_min = 1;
  int ngram_max = 3;
  std::size_t max_features = 50000;
};

struct NeuralSettings {
  int arch = 1;
  bool toy = false;
  std::size_t toy_pairs = 200;
  std::size_t vocab_size = 0;  // nn-build without data; 0 picks a default
  std::size_t glove_dim = 0;
  std::size_t max_words = 0;
  neural::ArchDims dims;
  neural::TrainConfig train;
};

/// Everything a command reads. Loaded from --config, then overridden by
/// flags; the resolved copy is embedded in every report.
struct ExperimentConfig {
  std::string data;
  std::string glove;
  std::string w2v;
  std::string features;
  std::string model_file;
  std::string tfidf_model;
  std::string grid_file;
  std::string out;
  std::string train_out;
  std::string test_out;
  std::string report_dir = ".";

  double test_fraction = 0.2;
  std::uint64_t seed = 0;
  std::size_t sample = 0;

  std::vector<std::string> drop;
  bool drop_low_importance = false;

  std::string model = "xgb";
  std::vector<std::string> models;          // reproduce; empty = all seven
  std::vector<std::string> hyperparameters;  // key=value overrides
  bool permutation = false;
  int repeats = 10;
  double val_fraction = learn::kDefaultValidationFraction;

  TfidfSettings tfidf;
  NeuralSettings nn;

  nlohmann::json to_json() const;
  static ExperimentConfig from_json(const nlohmann::json& doc);
};

ExperimentConfig load_config(const std::string& path);

/// {command, version, config, result}; no timestamps so reruns compare equal.
nlohmann::json make_report(const std::string& command, const ExperimentConfig& config, const nlohmann::json& result);
void write_report(const ExperimentConfig& config, const std::string& name, const nlohmann::json& report);
std::string version_string();

/// Embeddings named by --glove or --w2v, restricted to `vocabulary` words
/// when it is non-empty. Neither flag set is a contract error.
embed::EmbeddingTable load_embeddings_for(const ExperimentConfig& config, const std::vector<std::string>& vocabulary,
                                          const std::string& purpose);

/// Design matrix from a feature CSV (dense) or svmlight file (sparse).
struct Design {
  learn::Matrix x;
  std::vector<int> y;
  std::vector<std::string> names;
};
Design load_design(const std::string& path, const std::vector<std::string>& drop = {});
Design select_columns(const Design& design, const std::vector<std::string>& names);
learn::CsrMatrix to_csr(const learn::Matrix& x);

learn::ClassifierSpec resolve_spec(const std::string& kind, const std::vector<std::string>& overrides,
                                   std::uint64_t seed);

tfidf::TfidfOptions tfidf_options(const ExperimentConfig& c);
/// Deduplicated question texts of a training table.
std::vector<std::string> tfidf_corpus(const corpus::PairTable& train);
learn::CsrMatrix pair_matrix(const tfidf::TfidfModel& model, const corpus::PairTable& table);
std::vector<std::string> corpus_words(const corpus::PairTable& table);

std::string fixed(double value, int digits = 4);
std::string pad(const std::string& s, std::size_t width);

// Commands; each prints a human-readable table and returns its result JSON.
nlohmann::json cmd_stats(const ExperimentConfig& c, std::ostream& out);
nlohmann::json cmd_clean(const ExperimentConfig& c, std::ostream& out);
nlohmann::json cmd_split(const ExperimentConfig& c, std::ostream& out);
nlohmann::json cmd_featurize(const ExperimentConfig& c, std::ostream& out);
nlohmann::json cmd_tfidf_fit(const ExperimentConfig& c, std::ostream& out);
nlohmann::json cmd_tfidf_featurize(const ExperimentConfig& c, std::ostream& out);
nlohmann::json cmd_train(const ExperimentConfig& c, std::ostream& out);
nlohmann::json cmd_eval(const ExperimentConfig& c, std::ostream& out);
nlohmann::json cmd_importance(const ExperimentConfig& c, std::ostream& out);
nlohmann::json cmd_grid(const ExperimentConfig& c, std::ostream& out);
nlohmann::json cmd_nn_build(const ExperimentConfig& c, std::ostream& out);
nlohmann::json cmd_nn_train(const ExperimentConfig& c, std::ostream& out);
nlohmann::json cmd_nn_gradcheck(const ExperimentConfig& c, std::ostream& out);
nlohmann::json cmd_reproduce(const std::string& table, const ExperimentConfig& c, std::ostream& out);

}  // namespace dupliq::cli
