#pragma once

#include <array>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dupliq/corpus.hpp"
#include "dupliq/embed.hpp"

namespace dupliq::featmat {

inline constexpr std::size_t kFeatureCount = 28;

/// Canonical column order (version 1).
inline constexpr std::array<std::string_view, kFeatureCount> kFeatureNames = {
    "len_q1",          "len_q2",
    "len_diff",        "nchar_q1",
    "nchar_q2",        "nwords_q1",
    "nwords_q2",       "common_words",
    "qratio",          "wratio",
    "partial_ratio",   "token_set_ratio",
    "token_sort_ratio", "partial_token_set_ratio",
    "partial_token_sort_ratio", "wmd",
    "norm_wmd",        "cosine",
    "minkowski3",      "cityblock",
    "euclidean",       "jaccard",
    "canberra",        "braycurtis",
    "skew_q1",         "skew_q2",
    "kurt_q1",         "kurt_q2",
};

inline constexpr std::string_view kLabelColumn = "is_duplicate";

struct FeatureRow {
  std::array<double, kFeatureCount> values{};
  int label = 0;
};

/// All 28 features of one pair; pure in (pair, table).
FeatureRow extract_row(const corpus::QuestionPair& pair, const embed::EmbeddingTable& table);

/// Row-major numeric matrix with named columns and aligned 0/1 labels.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  explicit FeatureMatrix(std::vector<std::string> column_names);

  const std::vector<std::string>& column_names() const { return columns_; }
  std::size_t cols() const { return columns_.size(); }
  std::size_t rows() const { return labels_.size(); }
  const std::vector<double>& values() const { return values_; }
  const std::vector<int>& labels() const { return labels_; }

  std::span<const double> row(std::size_t i) const {
    return {values_.data() + i * cols(), cols()};
  }
  void add_row(std::span<const double> values, int label);

  bool operator==(const FeatureMatrix&) const = default;

 private:
  std::vector<std::string> columns_;
  std::vector<double> values_;
  std::vector<int> labels_;
};

/// Extracts every pair in parallel; rows come back in table order.
FeatureMatrix extract_matrix(const corpus::PairTable& table, const embed::EmbeddingTable& embeddings);

struct DropList {
  std::vector<std::string> names;

  /// The eight low-importance features dropped for the reduced model.
  static DropList low_importance();
};

/// Removes the named columns, keeping the order of the rest. Unknown names
/// throw ContractError.
FeatureMatrix drop_features(const FeatureMatrix& m, const DropList& drop);

/// CSV: header of column names plus a trailing is_duplicate column; values
/// written in shortest round-trip form.
void save_matrix(const FeatureMatrix& m, const std::filesystem::path& path);
FeatureMatrix load_matrix(const std::filesystem::path& path);
std::string format_matrix(const FeatureMatrix& m);
FeatureMatrix parse_matrix(std::string_view csv);

}  // namespace dupliq::featmat
