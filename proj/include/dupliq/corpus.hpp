#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

namespace dupliq::corpus {

/// One row of the question-pair TSV.
struct QuestionPair {
  std::int64_t row_id = 0;
  std::int64_t qid1 = 0;
  std::int64_t qid2 = 0;
  std::string question1;
  std::string question2;
  int is_duplicate = 0;

  bool operator==(const QuestionPair&) const = default;
};

struct PairTable {
  std::vector<QuestionPair> rows;

  std::size_t size() const { return rows.size(); }
  bool empty() const { return rows.empty(); }
  std::vector<int> labels() const;
  bool operator==(const PairTable&) const = default;
};

/// A malformed data line dropped under LoadOptions::skip_bad_rows.
struct RowIssue {
  std::size_t line = 0;  // 1-based physical line where the record starts
  std::string message;
};

struct LoadOptions {
  bool skip_bad_rows = false;
};

/// Reads `id qid1 qid2 question1 question2 is_duplicate` TSV with a header
/// line. Fields wrapped in double quotes may contain tabs and newlines; a
/// doubled quote inside such a field is a literal quote. Bad rows throw a
/// ContractError naming the line unless options.skip_bad_rows is set, in
/// which case they are dropped and reported through `skipped`.
PairTable load_pairs(const std::filesystem::path& path, const LoadOptions& options = {},
                     std::vector<RowIssue>* skipped = nullptr);
PairTable parse_pairs(std::string_view content, const LoadOptions& options = {},
                      std::vector<RowIssue>* skipped = nullptr);

/// Writes the table in the same TSV dialect load_pairs reads.
void save_pairs(const PairTable& table, const std::filesystem::path& path);
std::string format_pairs(const PairTable& table);

/// Questions with at most this many characters are dropped by clean().
inline constexpr std::size_t kShortQuestionLength = 5;

/// Drops rows where either question has at most kShortQuestionLength unicode
/// scalars (whitespace included). Order is preserved.
PairTable clean(const PairTable& table);

struct SplitTables {
  PairTable train;
  PairTable test;
};

/// Class-stratified split; both sides keep the input row order.
SplitTables stratified_split(const PairTable& table, double test_fraction, std::uint64_t seed);

/// Stratified subsample of `count` rows (all rows when count >= size).
PairTable stratified_sample(const PairTable& table, std::size_t count, std::uint64_t seed);

struct CorpusStats {
  std::size_t total_pairs = 0;
  std::size_t positives = 0;
  std::size_t negatives = 0;
  std::uint64_t sum_len_q1 = 0;
  std::uint64_t sum_len_q2 = 0;
  double avg_len_q1 = 0.0;
  double avg_len_q2 = 0.0;
  std::size_t max_len_q1 = 0;
  std::size_t max_len_q2 = 0;
  std::size_t short_q1 = 0;  // length <= kShortQuestionLength
  std::size_t short_q2 = 0;
  /// question text -> number of appearances across both columns
  std::unordered_map<std::string, std::size_t> question_occurrence;

  /// occurrence count -> number of distinct questions with that count
  std::map<std::size_t, std::size_t> occurrence_histogram() const;
};

CorpusStats corpus_stats(const PairTable& table);

}  // namespace dupliq::corpus
