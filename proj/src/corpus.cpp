#include "dupliq/corpus.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "dupliq/common.hpp"
#include "dupliq/stratify.hpp"
#include "dupliq/utf8.hpp"

namespace dupliq::corpus {
namespace {

constexpr std::array<std::string_view, 6> kHeader = {"id",        "qid1",      "qid2",
                                                     "question1", "question2", "is_duplicate"};

struct Record {
  std::size_t line = 0;
  std::vector<std::string> fields;
};

// Splits the whole file into records. Quoted fields may span lines.
std::vector<Record> split_records(std::string_view content) {
  std::vector<Record> records;
  std::size_t pos = 0;
  std::size_t line = 1;
  const std::size_t n = content.size();
  while (pos < n) {
    Record record;
    record.line = line;
    std::string field;
    bool end_of_record = false;
    while (!end_of_record) {
      field.clear();
      if (pos < n && content[pos] == '"') {
        ++pos;
        while (true) {
          if (pos >= n) break;
          const char c = content[pos];
          if (c == '"') {
            if (pos + 1 < n && content[pos + 1] == '"') {
              field.push_back('"');
              pos += 2;
              continue;
            }
            ++pos;
            break;
          }
          if (c == '\n') ++line;
          field.push_back(c);
          ++pos;
        }
        // Anything between the closing quote and the delimiter is kept verbatim.
        while (pos < n && content[pos] != '\t' && content[pos] != '\n') {
          if (content[pos] != '\r') field.push_back(content[pos]);
          ++pos;
        }
      } else {
        while (pos < n && content[pos] != '\t' && content[pos] != '\n') {
          field.push_back(content[pos]);
          ++pos;
        }
        if (!field.empty() && field.back() == '\r' && (pos >= n || content[pos] == '\n')) {
          field.pop_back();
        }
      }
      record.fields.push_back(field);
      if (pos >= n) {
        end_of_record = true;
      } else if (content[pos] == '\t') {
        ++pos;
      } else {
        ++pos;
        ++line;
        end_of_record = true;
      }
    }
    const bool blank = record.fields.size() == 1 && record.fields[0].empty();
    if (!blank) records.push_back(std::move(record));
  }
  return records;
}

QuestionPair parse_row(const Record& record) {
  if (record.fields.size() != kHeader.size()) {
    throw ContractError("line " + std::to_string(record.line) + ": expected 6 fields, found " +
                        std::to_string(record.fields.size()));
  }
  const auto where = "line " + std::to_string(record.line);
  QuestionPair pair;
  pair.row_id = parse_integer(record.fields[0], where + " id");
  pair.qid1 = parse_integer(record.fields[1], where + " qid1");
  pair.qid2 = parse_integer(record.fields[2], where + " qid2");
  pair.question1 = record.fields[3];
  pair.question2 = record.fields[4];
  const std::string& label = record.fields[5];
  if (label != "0" && label != "1") {
    throw ContractError(where + ": is_duplicate must be 0 or 1, found '" + label + "'");
  }
  pair.is_duplicate = label == "1" ? 1 : 0;
  return pair;
}

bool needs_quotes(std::string_view field) {
  return field.find_first_of("\t\n\r\"") != std::string_view::npos;
}

void write_field(std::string& out, std::string_view field) {
  if (!needs_quotes(field)) {
    out.append(field);
    return;
  }
  out.push_back('"');
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
}

PairTable select_rows(const PairTable& table, const std::vector<std::size_t>& positions) {
  PairTable out;
  out.rows.reserve(positions.size());
  for (std::size_t i : positions) out.rows.push_back(table.rows[i]);
  return out;
}

}  // namespace

std::vector<int> PairTable::labels() const {
  std::vector<int> out;
  out.reserve(rows.size());
  for (const auto& row : rows) out.push_back(row.is_duplicate);
  return out;
}

PairTable parse_pairs(std::string_view content, const LoadOptions& options,
                      std::vector<RowIssue>* skipped) {
  auto records = split_records(content);
  if (records.empty()) throw ContractError("missing header line");
  const Record& header = records.front();
  bool header_ok = header.fields.size() == kHeader.size();
  for (std::size_t i = 0; header_ok && i < kHeader.size(); ++i) {
    header_ok = header.fields[i] == kHeader[i];
  }
  if (!header_ok) {
    throw ContractError("line 1: header must be 'id qid1 qid2 question1 question2 is_duplicate'");
  }

  PairTable table;
  table.rows.reserve(records.size() - 1);
  std::unordered_set<std::int64_t> seen_ids;
  for (std::size_t r = 1; r < records.size(); ++r) {
    try {
      QuestionPair pair = parse_row(records[r]);
      if (!seen_ids.insert(pair.row_id).second) {
        throw ContractError("line " + std::to_string(records[r].line) + ": duplicate id " +
                            std::to_string(pair.row_id));
      }
      table.rows.push_back(std::move(pair));
    } catch (const ContractError& e) {
      if (!options.skip_bad_rows) throw;
      if (skipped) skipped->push_back({records[r].line, e.what()});
    }
  }
  return table;
}

PairTable load_pairs(const std::filesystem::path& path, const LoadOptions& options,
                     std::vector<RowIssue>* skipped) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw IoError("failed reading " + path.string());
  return parse_pairs(buffer.str(), options, skipped);
}

std::string format_pairs(const PairTable& table) {
  std::string out = "id\tqid1\tqid2\tquestion1\tquestion2\tis_duplicate\n";
  for (const auto& row : table.rows) {
    out += std::to_string(row.row_id);
    out += '\t';
    out += std::to_string(row.qid1);
    out += '\t';
    out += std::to_string(row.qid2);
    out += '\t';
    write_field(out, row.question1);
    out += '\t';
    write_field(out, row.question2);
    out += '\t';
    out += row.is_duplicate ? '1' : '0';
    out += '\n';
  }
  return out;
}

void save_pairs(const PairTable& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  const std::string text = format_pairs(table);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("failed writing " + path.string());
}

PairTable clean(const PairTable& table) {
  PairTable out;
  out.rows.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    if (utf8::length(row.question1) <= kShortQuestionLength) continue;
    if (utf8::length(row.question2) <= kShortQuestionLength) continue;
    out.rows.push_back(row);
  }
  return out;
}

SplitTables stratified_split(const PairTable& table, double test_fraction, std::uint64_t seed) {
  const auto labels = table.labels();
  const IndexSplit split = stratified_indices(labels, test_fraction, seed);
  return {select_rows(table, split.train), select_rows(table, split.test)};
}

PairTable stratified_sample(const PairTable& table, std::size_t count, std::uint64_t seed) {
  if (count >= table.size()) return table;
  const auto labels = table.labels();
  const double fraction = static_cast<double>(count) / static_cast<double>(table.size());
  const IndexSplit split = stratified_indices(labels, fraction, seed);
  return select_rows(table, split.test);
}

CorpusStats corpus_stats(const PairTable& table) {
  CorpusStats stats;
  stats.total_pairs = table.size();
  for (const auto& row : table.rows) {
    (row.is_duplicate ? stats.positives : stats.negatives) += 1;
    const std::size_t len1 = utf8::length(row.question1);
    const std::size_t len2 = utf8::length(row.question2);
    stats.sum_len_q1 += len1;
    stats.sum_len_q2 += len2;
    stats.max_len_q1 = std::max(stats.max_len_q1, len1);
    stats.max_len_q2 = std::max(stats.max_len_q2, len2);
    if (len1 <= kShortQuestionLength) ++stats.short_q1;
    if (len2 <= kShortQuestionLength) ++stats.short_q2;
    ++stats.question_occurrence[row.question1];
    ++stats.question_occurrence[row.question2];
  }
  if (stats.total_pairs > 0) {
    const auto n = static_cast<double>(stats.total_pairs);
    stats.avg_len_q1 = static_cast<double>(stats.sum_len_q1) / n;
    stats.avg_len_q2 = static_cast<double>(stats.sum_len_q2) / n;
  }
  return stats;
}

std::map<std::size_t, std::size_t> CorpusStats::occurrence_histogram() const {
  std::map<std::size_t, std::size_t> histogram;
  for (const auto& [question, count] : question_occurrence) ++histogram[count];
  return histogram;
}

}  // namespace dupliq::corpus
