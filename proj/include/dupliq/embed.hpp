#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "dupliq/textops.hpp"

namespace dupliq::embed {

/// word -> dense float vector, all of one dimension. Immutable once loaded,
/// so concurrent lookups are safe.
class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  explicit EmbeddingTable(std::size_t dim) : dim_(dim) {}

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return words_.size(); }
  const std::vector<std::string>& words() const { return words_; }

  /// Adds a word; returns false (and keeps the first vector) on duplicates.
  bool add(std::string word, std::span<const float> vector);

  /// Exact match only.
  std::optional<std::span<const float>> find(std::string_view word) const;
  /// Exact match, then the lowercased token.
  std::optional<std::span<const float>> lookup(std::string_view token) const;

 private:
  std::size_t dim_ = 0;
  std::vector<std::string> words_;
  std::vector<float> data_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Optional predicate restricting which words get stored while loading.
using WordFilter = std::function<bool(std::string_view)>;

/// `word v1 ... vdim` lines; dim comes from the first line. Words containing
/// spaces are accepted: the last dim fields are the vector. gzip input is
/// decompressed transparently.
EmbeddingTable load_glove_text(const std::filesystem::path& path, const WordFilter& keep = {});

struct Word2VecHeader {
  std::size_t vocab_size = 0;
  std::size_t dim = 0;
};

Word2VecHeader read_word2vec_header(const std::filesystem::path& path);

/// Binary word2vec: ASCII "vocab_size dim\n" then, per word, the word bytes,
/// one space and dim little-endian float32 values (newline separators between
/// entries tolerated). gzip input is decompressed transparently.
EmbeddingTable load_word2vec_binary(const std::filesystem::path& path, const WordFilter& keep = {});
void save_word2vec_binary(const EmbeddingTable& table, const std::filesystem::path& path);

/// Picks the loader from the file name: ".bin" / ".bin.gz" means word2vec
/// binary, anything else GloVe text.
EmbeddingTable load_embeddings(const std::filesystem::path& path, const WordFilter& keep = {});

struct SentenceVector {
  std::vector<double> values;
  std::size_t token_count = 0;  // in-vocabulary tokens averaged
};

/// Mean of the in-vocabulary token vectors; each word vector is unit-scaled
/// first when normalize_words is set. No known tokens -> zero vector.
SentenceVector sentence_vector(const textops::TokenList& tokens, const EmbeddingTable& table,
                               bool normalize_words);

/// WMD when either side has no in-vocabulary token.
inline constexpr double kEmptyWmd = 1.0;

/// Word Mover's Distance between two stop-word-filtered token lists:
/// exact optimal transport between their normalized bag-of-words with
/// euclidean ground cost between word vectors (unit-scaled first when
/// normalize_words is set).
double wmd(const textops::TokenList& tokens1, const textops::TokenList& tokens2,
           const EmbeddingTable& table, bool normalize_words);

enum class Metric { cosine, cityblock, canberra, euclidean, minkowski3, braycurtis, jaccard };

inline constexpr int kMinkowskiOrder = 3;

std::string_view metric_name(Metric metric);

/// Vector distance with degenerate denominators imputed: cosine is 0 when
/// both vectors are zero and 1 when exactly one is; braycurtis, canberra
/// terms and jaccard contribute 0 on zero denominators.
double distance(std::span<const double> u, std::span<const double> v, Metric metric);

struct Moments {
  double skew = 0.0;
  double kurtosis = 0.0;  // excess
};

/// Biased sample skewness and excess kurtosis over the components.
/// Zero variance gives {0, 0}.
Moments moments(std::span<const double> values);

struct DistanceFeatures {
  double wmd = 0;
  double norm_wmd = 0;
  double cosine = 0;
  double cityblock = 0;
  double canberra = 0;
  double euclidean = 0;
  double minkowski3 = 0;
  double braycurtis = 0;
  double jaccard = 0;
};

DistanceFeatures distance_features(const textops::TokenList& tokens1,
                                   const textops::TokenList& tokens2, const EmbeddingTable& table);

}  // namespace dupliq::embed
