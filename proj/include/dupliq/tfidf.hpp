#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace dupliq::tfidf {

enum class Analyzer { word, character };

struct TfidfOptions {
  Analyzer analyzer = Analyzer::character;
  int ngram_min = 1;
  int ngram_max = 3;
  std::size_t max_features = 50000;
};

TfidfOptions default_options(Analyzer analyzer);

/// Sparse vector with strictly increasing indices and non-zero values.
struct SparseVec {
  std::size_t dim = 0;
  std::vector<std::pair<std::uint32_t, double>> entries;
};

/// Fitted vocabulary with smoothed idf weights. Column indices follow the
/// lexicographic order of the retained terms.
class TfidfModel {
 public:
  TfidfModel() = default;
  TfidfModel(TfidfOptions options, std::vector<std::string> terms, std::vector<double> idf);

  const TfidfOptions& options() const { return options_; }
  std::size_t size() const { return terms_.size(); }
  const std::vector<std::string>& terms() const { return terms_; }
  const std::vector<double>& idf() const { return idf_; }
  /// Column of `term`, or -1.
  long long index_of(const std::string& term) const;

  /// Term counts times idf, L2-normalized. No known term -> empty vector.
  SparseVec transform(std::string_view text) const;

  /// transform(q1) in [0, size()) followed by transform(q2) in [size(), 2*size()).
  SparseVec pair_vector(std::string_view q1, std::string_view q2) const;

 private:
  TfidfOptions options_;
  std::vector<std::string> terms_;
  std::vector<double> idf_;
  std::unordered_map<std::string, std::uint32_t> vocabulary_;
};

/// Terms of one document: normalized-text word n-grams, or character
/// n-grams of the lowercased raw text (spaces included).
std::vector<std::string> analyze(std::string_view text, const TfidfOptions& options);

/// idf(t) = ln((1 + N) / (1 + df(t))) + 1 over the N corpus documents; keeps
/// the max_features terms of highest df, ties broken lexicographically.
/// Throws ContractError on an empty corpus or an invalid n-gram range.
TfidfModel fit(std::span<const std::string> corpus, const TfidfOptions& options);

/// Versioned JSON: {version, analyzer, ngram_range, max_features, terms}.
void save_model(const TfidfModel& model, const std::filesystem::path& path);
TfidfModel load_model(const std::filesystem::path& path);
std::string model_to_json(const TfidfModel& model);
TfidfModel model_from_json(std::string_view json);

std::string_view analyzer_name(Analyzer analyzer);
Analyzer parse_analyzer(std::string_view name);

}  // namespace dupliq::tfidf
