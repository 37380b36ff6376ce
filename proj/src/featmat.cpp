#include "dupliq/featmat.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "dupliq/common.hpp"
#include "dupliq/fuzzy.hpp"
#include "dupliq/textops.hpp"

namespace dupliq::featmat {

FeatureRow extract_row(const corpus::QuestionPair& pair, const embed::EmbeddingTable& table) {
  const auto basic = textops::basic_features(pair.question1, pair.question2);
  const auto fz = fuzzy::fuzzy_features(pair.question1, pair.question2);
  const auto tokens1 = textops::content_tokens(pair.question1);
  const auto tokens2 = textops::content_tokens(pair.question2);
  const auto dist = embed::distance_features(tokens1, tokens2, table);
  const auto m1 = embed::moments(embed::sentence_vector(tokens1, table, false).values);
  const auto m2 = embed::moments(embed::sentence_vector(tokens2, table, false).values);

  FeatureRow row;
  row.label = pair.is_duplicate;
  row.values = {basic.len_q1,
                basic.len_q2,
                basic.len_diff,
                basic.nchar_q1,
                basic.nchar_q2,
                basic.nwords_q1,
                basic.nwords_q2,
                basic.common_words,
                fz.qratio,
                fz.wratio,
                fz.partial_ratio,
                fz.token_set_ratio,
                fz.token_sort_ratio,
                fz.partial_token_set_ratio,
                fz.partial_token_sort_ratio,
                dist.wmd,
                dist.norm_wmd,
                dist.cosine,
                dist.minkowski3,
                dist.cityblock,
                dist.euclidean,
                dist.jaccard,
                dist.canberra,
                dist.braycurtis,
                m1.skew,
                m2.skew,
                m1.kurtosis,
                m2.kurtosis};
  return row;
}

FeatureMatrix::FeatureMatrix(std::vector<std::string> column_names)
    : columns_(std::move(column_names)) {}

void FeatureMatrix::add_row(std::span<const double> values, int label) {
  if (values.size() != cols()) throw ContractError("feature row width does not match columns");
  if (label != 0 && label != 1) throw ContractError("label must be 0 or 1");
  values_.insert(values_.end(), values.begin(), values.end());
  labels_.push_back(label);
}

FeatureMatrix extract_matrix(const corpus::PairTable& table, const embed::EmbeddingTable& embeddings) {
  std::vector<FeatureRow> rows(table.size());
  parallel_for(table.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) rows[i] = extract_row(table.rows[i], embeddings);
  });
  FeatureMatrix m(std::vector<std::string>(kFeatureNames.begin(), kFeatureNames.end()));
  for (const auto& row : rows) m.add_row(row.values, row.label);
  return m;
}

DropList DropList::low_importance() {
  return {{"len_diff", "wratio", "jaccard", "braycurtis", "euclidean", "cityblock",
           "partial_token_set_ratio", "partial_token_sort_ratio"}};
}

FeatureMatrix drop_features(const FeatureMatrix& m, const DropList& drop) {
  const std::set<std::string> names(drop.names.begin(), drop.names.end());
  for (const auto& name : names) {
    if (std::find(m.column_names().begin(), m.column_names().end(), name) == m.column_names().end()) {
      throw ContractError("cannot drop unknown feature '" + name + "'");
    }
  }
  std::vector<std::size_t> keep;
  std::vector<std::string> kept_names;
  for (std::size_t c = 0; c < m.cols(); ++c) {
    if (!names.count(m.column_names()[c])) {
      keep.push_back(c);
      kept_names.push_back(m.column_names()[c]);
    }
  }
  FeatureMatrix out(std::move(kept_names));
  std::vector<double> buffer(keep.size());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto row = m.row(r);
    for (std::size_t k = 0; k < keep.size(); ++k) buffer[k] = row[keep[k]];
    out.add_row(buffer, m.labels()[r]);
  }
  return out;
}

std::string format_matrix(const FeatureMatrix& m) {
  std::string out;
  for (const auto& name : m.column_names()) {
    out += name;
    out += ',';
  }
  out += kLabelColumn;
  out += '\n';
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (double x : m.row(r)) {
      out += format_double(x);
      out += ',';
    }
    out += m.labels()[r] ? '1' : '0';
    out += '\n';
  }
  return out;
}

void save_matrix(const FeatureMatrix& m, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  const std::string text = format_matrix(m);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("failed writing " + path.string());
}

namespace {

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    cells.push_back(line.substr(start, comma == std::string_view::npos ? comma : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

}  // namespace

FeatureMatrix parse_matrix(std::string_view csv) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < csv.size()) {
    std::size_t nl = csv.find('\n', start);
    if (nl == std::string_view::npos) nl = csv.size();
    std::string_view line = csv.substr(start, nl - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) lines.push_back(line);
    start = nl + 1;
  }
  if (lines.empty()) throw ContractError("feature CSV is empty");
  const auto header = split_commas(lines[0]);
  const auto label_it = std::find(header.begin(), header.end(), kLabelColumn);
  if (label_it == header.end()) throw ContractError("feature CSV has no is_duplicate column");
  const auto label_col = static_cast<std::size_t>(label_it - header.begin());

  std::vector<std::string> names;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c != label_col) names.emplace_back(header[c]);
  }
  FeatureMatrix m(names);
  std::vector<double> values(names.size());
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto cells = split_commas(lines[r]);
    if (cells.size() != header.size()) {
      throw ContractError("feature CSV row " + std::to_string(r) + " has " +
                          std::to_string(cells.size()) + " cells, expected " +
                          std::to_string(header.size()));
    }
    int label = 0;
    std::size_t k = 0;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const std::string where = "row " + std::to_string(r) + ", column '" + std::string(header[c]) + "'";
      if (c == label_col) {
        if (cells[c] != "0" && cells[c] != "1") {
          throw ContractError("label '" + std::string(cells[c]) + "' at " + where + " must be 0 or 1");
        }
        label = cells[c] == "1";
      } else {
        values[k++] = parse_double(cells[c], where);
      }
    }
    m.add_row(values, label);
  }
  return m;
}

FeatureMatrix load_matrix(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_matrix(buffer.str());
}

}  // namespace dupliq::featmat
