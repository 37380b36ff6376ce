#include "dupliq/embed.hpp"

#include <zlib.h>

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>

#include "dupliq/common.hpp"
#include "dupliq/transport.hpp"
#include "dupliq/utf8.hpp"

namespace dupliq::embed {
namespace {

// Buffered reader over plain or gzip files (zlib passes plain files through).
class Reader {
 public:
  explicit Reader(const std::filesystem::path& path) : path_(path.string()) {
    file_ = gzopen(path_.c_str(), "rb");
    if (file_ == nullptr) throw IoError("cannot open " + path_);
    gzbuffer(file_, 1 << 20);
  }
  ~Reader() {
    if (file_ != nullptr) gzclose(file_);
  }
  Reader(const Reader&) = delete;
  Reader& operator=(const Reader&) = delete;

  // Returns -1 at end of input.
  int get() {
    if (pos_ == end_ && !fill()) return -1;
    return static_cast<unsigned char>(buffer_[pos_++]);
  }

  // Copies exactly n bytes unless input ends; returns bytes copied.
  std::size_t read(char* out, std::size_t n) {
    std::size_t copied = 0;
    while (copied < n) {
      if (pos_ == end_ && !fill()) break;
      const std::size_t take = std::min(n - copied, end_ - pos_);
      std::memcpy(out + copied, buffer_.data() + pos_, take);
      pos_ += take;
      copied += take;
    }
    return copied;
  }

  bool getline(std::string& line) {
    line.clear();
    int c = get();
    if (c < 0) return false;
    while (c >= 0 && c != '\n') {
      line.push_back(static_cast<char>(c));
      c = get();
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  }

  const std::string& path() const { return path_; }

 private:
  bool fill() {
    const int got = gzread(file_, buffer_.data(), static_cast<unsigned>(buffer_.size()));
    if (got < 0) throw IoError("failed reading " + path_);
    pos_ = 0;
    end_ = static_cast<std::size_t>(got);
    return got > 0;
  }

  std::string path_;
  gzFile file_ = nullptr;
  std::vector<char> buffer_ = std::vector<char>(1 << 20);
  std::size_t pos_ = 0;
  std::size_t end_ = 0;
};

std::vector<std::string_view> split_spaces(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && line[i] == ' ') ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ') ++i;
    if (i > start) fields.push_back(line.substr(start, i - start));
  }
  return fields;
}

bool parse_float(std::string_view text, float& out) {
  const char* first = text.data();
  const char* last = first + text.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

Word2VecHeader parse_header(Reader& reader) {
  std::string line;
  if (!reader.getline(line)) throw ContractError(reader.path() + ": missing word2vec header");
  const auto fields = split_spaces(line);
  if (fields.size() != 2) throw ContractError(reader.path() + ": unparsable word2vec header '" + line + "'");
  Word2VecHeader header;
  try {
    header.vocab_size = static_cast<std::size_t>(parse_integer(fields[0], "word2vec header"));
    header.dim = static_cast<std::size_t>(parse_integer(fields[1], "word2vec header"));
  } catch (const ContractError&) {
    throw ContractError(reader.path() + ": unparsable word2vec header '" + line + "'");
  }
  if (header.dim == 0) throw ContractError(reader.path() + ": word2vec dimension must be positive");
  return header;
}

double norm(std::span<const float> v) {
  double s = 0.0;
  for (float x : v) s += static_cast<double>(x) * static_cast<double>(x);
  return std::sqrt(s);
}

// Distinct in-vocabulary words with their counts, in first-appearance order.
struct Bag {
  std::vector<std::vector<double>> vectors;
  std::vector<long long> counts;
  long long total = 0;
};

Bag make_bag(const textops::TokenList& tokens, const EmbeddingTable& table, bool normalize_words) {
  Bag bag;
  std::map<std::string, std::size_t> slot;
  for (const auto& token : tokens) {
    auto found = table.lookup(token);
    if (!found) continue;
    auto [it, inserted] = slot.emplace(token, bag.vectors.size());
    if (inserted) {
      std::vector<double> v(found->begin(), found->end());
      if (normalize_words) {
        const double n = norm(*found);
        if (n > 0) {
          for (double& x : v) x /= n;
        }
      }
      bag.vectors.push_back(std::move(v));
      bag.counts.push_back(0);
    }
    ++bag.counts[it->second];
    ++bag.total;
  }
  return bag;
}

}  // namespace

bool EmbeddingTable::add(std::string word, std::span<const float> vector) {
  if (vector.size() != dim_) throw ContractError("embedding vector has wrong dimension");
  if (index_.count(word)) return false;
  index_.emplace(word, words_.size());
  words_.push_back(std::move(word));
  data_.insert(data_.end(), vector.begin(), vector.end());
  return true;
}

std::optional<std::span<const float>> EmbeddingTable::find(std::string_view word) const {
  auto it = index_.find(std::string(word));
  if (it == index_.end()) return std::nullopt;
  return std::span<const float>(data_.data() + it->second * dim_, dim_);
}

std::optional<std::span<const float>> EmbeddingTable::lookup(std::string_view token) const {
  if (auto exact = find(token)) return exact;
  const std::string lower = utf8::to_lower(token);
  if (lower != token) return find(lower);
  return std::nullopt;
}

EmbeddingTable load_glove_text(const std::filesystem::path& path, const WordFilter& keep) {
  Reader reader(path);
  EmbeddingTable table;
  std::string line;
  std::size_t line_no = 0;
  std::vector<float> vector;
  while (reader.getline(line)) {
    ++line_no;
    const auto fields = split_spaces(line);
    if (fields.empty()) continue;
    if (table.dim() == 0) {
      if (fields.size() < 2) throw ContractError(path.string() + ": line 1 has no vector components");
      table = EmbeddingTable(fields.size() - 1);
    }
    const std::size_t dim = table.dim();
    if (fields.size() < dim + 1) {
      throw ContractError(path.string() + ": line " + std::to_string(line_no) + " has " +
                          std::to_string(fields.size() - 1) + " components, expected " +
                          std::to_string(dim));
    }
    const std::size_t word_fields = fields.size() - dim;
    std::string word(fields[0]);
    for (std::size_t k = 1; k < word_fields; ++k) {
      word += ' ';
      word += fields[k];
    }
    if (keep && !keep(word)) continue;
    vector.resize(dim);
    for (std::size_t k = 0; k < dim; ++k) {
      if (!parse_float(fields[word_fields + k], vector[k])) {
        throw ContractError(path.string() + ": line " + std::to_string(line_no) +
                            " has non-numeric component '" + std::string(fields[word_fields + k]) +
                            "'");
      }
    }
    table.add(std::move(word), vector);
  }
  if (table.dim() == 0) throw ContractError(path.string() + ": no embedding lines");
  return table;
}

Word2VecHeader read_word2vec_header(const std::filesystem::path& path) {
  Reader reader(path);
  return parse_header(reader);
}

EmbeddingTable load_word2vec_binary(const std::filesystem::path& path, const WordFilter& keep) {
  Reader reader(path);
  const Word2VecHeader header = parse_header(reader);
  EmbeddingTable table(header.dim);
  std::vector<char> raw(header.dim * 4);
  std::vector<float> vector(header.dim);
  std::string word;
  for (std::size_t w = 0; w < header.vocab_size; ++w) {
    const auto truncated = [&] {
      return ContractError(path.string() + ": truncated after " + std::to_string(w) + " of " +
                           std::to_string(header.vocab_size) + " words");
    };
    word.clear();
    int c = reader.get();
    while (c == '\n' || c == '\r') c = reader.get();
    while (c >= 0 && c != ' ') {
      word.push_back(static_cast<char>(c));
      c = reader.get();
    }
    if (c < 0) throw truncated();
    if (reader.read(raw.data(), raw.size()) != raw.size()) throw truncated();
    for (std::size_t k = 0; k < header.dim; ++k) {
      const auto* b = reinterpret_cast<const unsigned char*>(raw.data() + 4 * k);
      const std::uint32_t bits = static_cast<std::uint32_t>(b[0]) |
                                 (static_cast<std::uint32_t>(b[1]) << 8) |
                                 (static_cast<std::uint32_t>(b[2]) << 16) |
                                 (static_cast<std::uint32_t>(b[3]) << 24);
      vector[k] = std::bit_cast<float>(bits);
    }
    if (keep && !keep(word)) continue;
    table.add(word, vector);
  }
  return table;
}

void save_word2vec_binary(const EmbeddingTable& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << table.size() << ' ' << table.dim() << '\n';
  for (const auto& word : table.words()) {
    out << word << ' ';
    const std::span<const float> vector = *table.find(word);
    for (float x : vector) {
      const auto bits = std::bit_cast<std::uint32_t>(x);
      const char bytes[4] = {static_cast<char>(bits & 0xFF), static_cast<char>((bits >> 8) & 0xFF),
                             static_cast<char>((bits >> 16) & 0xFF),
                             static_cast<char>((bits >> 24) & 0xFF)};
      out.write(bytes, 4);
    }
    out << '\n';
  }
  if (!out) throw IoError("failed writing " + path.string());
}

EmbeddingTable load_embeddings(const std::filesystem::path& path, const WordFilter& keep) {
  const std::string name = path.filename().string();
  const auto ends_with = [&](std::string_view suffix) {
    return name.size() >= suffix.size() && name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0;
  };
  if (ends_with(".bin") || ends_with(".bin.gz")) return load_word2vec_binary(path, keep);
  return load_glove_text(path, keep);
}

SentenceVector sentence_vector(const textops::TokenList& tokens, const EmbeddingTable& table,
                               bool normalize_words) {
  SentenceVector out;
  out.values.assign(table.dim(), 0.0);
  for (const auto& token : tokens) {
    auto found = table.lookup(token);
    if (!found) continue;
    const double scale = normalize_words ? norm(*found) : 1.0;
    if (scale == 0.0) continue;
    for (std::size_t k = 0; k < table.dim(); ++k) out.values[k] += static_cast<double>((*found)[k]) / scale;
    ++out.token_count;
  }
  if (out.token_count > 0) {
    for (double& x : out.values) x /= static_cast<double>(out.token_count);
  }
  return out;
}

double wmd(const textops::TokenList& tokens1, const textops::TokenList& tokens2,
           const EmbeddingTable& table, bool normalize_words) {
  const Bag a = make_bag(tokens1, table, normalize_words);
  const Bag b = make_bag(tokens2, table, normalize_words);
  if (a.total == 0 || b.total == 0) return kEmptyWmd;

  // Integer masses: word weight count/total scaled by the product of totals.
  std::vector<long long> supply(a.counts.size()), demand(b.counts.size());
  for (std::size_t i = 0; i < supply.size(); ++i) supply[i] = a.counts[i] * b.total;
  for (std::size_t j = 0; j < demand.size(); ++j) demand[j] = b.counts[j] * a.total;
  std::vector<double> cost(supply.size() * demand.size());
  for (std::size_t i = 0; i < supply.size(); ++i) {
    for (std::size_t j = 0; j < demand.size(); ++j) {
      cost[i * demand.size() + j] = distance(a.vectors[i], b.vectors[j], Metric::euclidean);
    }
  }
  const TransportPlan plan = solve_transport(supply, demand, cost);
  return plan.cost / static_cast<double>(a.total * b.total);
}

std::string_view metric_name(Metric metric) {
  switch (metric) {
    case Metric::cosine: return "cosine";
    case Metric::cityblock: return "cityblock";
    case Metric::canberra: return "canberra";
    case Metric::euclidean: return "euclidean";
    case Metric::minkowski3: return "minkowski3";
    case Metric::braycurtis: return "braycurtis";
    case Metric::jaccard: return "jaccard";
  }
  return "unknown";
}

double distance(std::span<const double> u, std::span<const double> v, Metric metric) {
  if (u.size() != v.size()) throw ContractError("distance: vectors differ in dimension");
  const std::size_t n = u.size();
  switch (metric) {
    case Metric::cosine: {
      double dot = 0, nu = 0, nv = 0;
      for (std::size_t i = 0; i < n; ++i) {
        dot += u[i] * v[i];
        nu += u[i] * u[i];
        nv += v[i] * v[i];
      }
      if (nu == 0 && nv == 0) return 0.0;
      if (nu == 0 || nv == 0) return 1.0;
      return 1.0 - dot / (std::sqrt(nu) * std::sqrt(nv));
    }
    case Metric::cityblock: {
      double s = 0;
      for (std::size_t i = 0; i < n; ++i) s += std::abs(u[i] - v[i]);
      return s;
    }
    case Metric::canberra: {
      double s = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const double den = std::abs(u[i]) + std::abs(v[i]);
        if (den != 0) s += std::abs(u[i] - v[i]) / den;
      }
      return s;
    }
    case Metric::euclidean: {
      double s = 0;
      for (std::size_t i = 0; i < n; ++i) s += (u[i] - v[i]) * (u[i] - v[i]);
      return std::sqrt(s);
    }
    case Metric::minkowski3: {
      double s = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const double d = std::abs(u[i] - v[i]);
        s += d * d * d;
      }
      return std::cbrt(s);
    }
    case Metric::braycurtis: {
      double num = 0, den = 0;
      for (std::size_t i = 0; i < n; ++i) {
        num += std::abs(u[i] - v[i]);
        den += std::abs(u[i] + v[i]);
      }
      return den == 0 ? 0.0 : num / den;
    }
    case Metric::jaccard: {
      std::size_t differ = 0, nonzero = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const bool any = u[i] != 0 || v[i] != 0;
        nonzero += any;
        differ += any && u[i] != v[i];
      }
      return nonzero == 0 ? 0.0 : static_cast<double>(differ) / static_cast<double>(nonzero);
    }
  }
  throw ContractError("unknown metric");
}

Moments moments(std::span<const double> values) {
  if (values.empty()) return {};
  const auto n = static_cast<double>(values.size());
  double mean = 0;
  for (double x : values) mean += x;
  mean /= n;
  double m2 = 0, m3 = 0, m4 = 0;
  for (double x : values) {
    const double d = x - mean;
    const double d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  if (m2 == 0) return {};
  return {m3 / std::pow(m2, 1.5), m4 / (m2 * m2) - 3.0};
}

DistanceFeatures distance_features(const textops::TokenList& tokens1,
                                   const textops::TokenList& tokens2, const EmbeddingTable& table) {
  DistanceFeatures f;
  f.wmd = wmd(tokens1, tokens2, table, false);
  f.norm_wmd = wmd(tokens1, tokens2, table, true);
  const SentenceVector u = sentence_vector(tokens1, table, false);
  const SentenceVector v = sentence_vector(tokens2, table, false);
  f.cosine = distance(u.values, v.values, Metric::cosine);
  f.cityblock = distance(u.values, v.values, Metric::cityblock);
  f.canberra = distance(u.values, v.values, Metric::canberra);
  f.euclidean = distance(u.values, v.values, Metric::euclidean);
  f.minkowski3 = distance(u.values, v.values, Metric::minkowski3);
  f.braycurtis = distance(u.values, v.values, Metric::braycurtis);
  f.jaccard = distance(u.values, v.values, Metric::jaccard);
  return f;
}

}  // namespace dupliq::embed
