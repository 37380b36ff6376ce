#include "dupliq/tfidf.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <nlohmann/json.hpp>
#include <sstream>
#include <unordered_set>

#include "dupliq/common.hpp"
#include "dupliq/textops.hpp"
#include "dupliq/utf8.hpp"

namespace dupliq::tfidf {
namespace {

constexpr int kModelVersion = 1;

void validate(const TfidfOptions& options) {
  if (options.ngram_min < 1 || options.ngram_max < options.ngram_min) {
    throw ContractError("invalid n-gram range");
  }
  if (options.max_features == 0) throw ContractError("max_features must be positive");
}

}  // namespace

TfidfOptions default_options(Analyzer analyzer) {
  TfidfOptions options;
  options.analyzer = analyzer;
  options.ngram_min = 1;
  options.ngram_max = analyzer == Analyzer::character ? 3 : 1;
  options.max_features = 50000;
  return options;
}

std::string_view analyzer_name(Analyzer analyzer) {
  return analyzer == Analyzer::word ? "word" : "char";
}

Analyzer parse_analyzer(std::string_view name) {
  if (name == "word") return Analyzer::word;
  if (name == "char") return Analyzer::character;
  throw ContractError("unknown analyzer '" + std::string(name) + "' (expected word or char)");
}

std::vector<std::string> analyze(std::string_view text, const TfidfOptions& options) {
  std::vector<std::string> terms;
  const auto lo = static_cast<std::size_t>(options.ngram_min);
  const auto hi = static_cast<std::size_t>(options.ngram_max);
  if (options.analyzer == Analyzer::word) {
    const auto tokens = textops::tokenize(textops::normalize_text(text));
    for (std::size_t n = lo; n <= hi; ++n) {
      for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
        std::string term = tokens[i];
        for (std::size_t k = 1; k < n; ++k) {
          term += ' ';
          term += tokens[i + k];
        }
        terms.push_back(std::move(term));
      }
    }
  } else {
    std::u32string chars = utf8::decode(text);
    for (char32_t& c : chars) c = utf8::to_lower(c);
    for (std::size_t n = lo; n <= hi; ++n) {
      for (std::size_t i = 0; i + n <= chars.size(); ++i) {
        terms.push_back(utf8::encode(std::u32string_view(chars).substr(i, n)));
      }
    }
  }
  return terms;
}

TfidfModel::TfidfModel(TfidfOptions options, std::vector<std::string> terms, std::vector<double> idf)
    : options_(options), terms_(std::move(terms)), idf_(std::move(idf)) {
  if (terms_.size() != idf_.size()) throw ContractError("tfidf terms and idf differ in length");
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (!(idf_[i] > 0)) throw ContractError("tfidf idf weights must be positive");
    if (!vocabulary_.emplace(terms_[i], static_cast<std::uint32_t>(i)).second) {
      throw ContractError("duplicate tfidf term '" + terms_[i] + "'");
    }
  }
}

long long TfidfModel::index_of(const std::string& term) const {
  auto it = vocabulary_.find(term);
  return it == vocabulary_.end() ? -1 : static_cast<long long>(it->second);
}

SparseVec TfidfModel::transform(std::string_view text) const {
  std::map<std::uint32_t, double> counts;
  for (const auto& term : analyze(text, options_)) {
    auto it = vocabulary_.find(term);
    if (it != vocabulary_.end()) counts[it->second] += 1.0;
  }
  SparseVec out;
  out.dim = terms_.size();
  double norm = 0.0;
  for (auto& [index, value] : counts) {
    value *= idf_[index];
    norm += value * value;
  }
  norm = std::sqrt(norm);
  for (const auto& [index, value] : counts) out.entries.emplace_back(index, value / norm);
  return out;
}

SparseVec TfidfModel::pair_vector(std::string_view q1, std::string_view q2) const {
  SparseVec out = transform(q1);
  const SparseVec second = transform(q2);
  out.dim = 2 * terms_.size();
  const auto offset = static_cast<std::uint32_t>(terms_.size());
  for (const auto& [index, value] : second.entries) out.entries.emplace_back(index + offset, value);
  return out;
}

TfidfModel fit(std::span<const std::string> corpus, const TfidfOptions& options) {
  validate(options);
  if (corpus.empty()) throw ContractError("cannot fit tfidf on an empty corpus");

  std::unordered_map<std::string, std::size_t> df;
  for (const auto& document : corpus) {
    auto terms = analyze(document, options);
    std::sort(terms.begin(), terms.end());
    terms.erase(std::unique(terms.begin(), terms.end()), terms.end());
    for (auto& term : terms) ++df[std::move(term)];
  }

  std::vector<std::pair<std::string, std::size_t>> ranked(df.begin(), df.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  if (ranked.size() > options.max_features) ranked.resize(options.max_features);
  std::sort(ranked.begin(), ranked.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  const auto n = static_cast<double>(corpus.size());
  std::vector<std::string> terms;
  std::vector<double> idf;
  terms.reserve(ranked.size());
  idf.reserve(ranked.size());
  for (auto& [term, count] : ranked) {
    terms.push_back(std::move(term));
    idf.push_back(std::log((1.0 + n) / (1.0 + static_cast<double>(count))) + 1.0);
  }
  return TfidfModel(options, std::move(terms), std::move(idf));
}

std::string model_to_json(const TfidfModel& model) {
  nlohmann::json doc;
  doc["version"] = kModelVersion;
  doc["analyzer"] = analyzer_name(model.options().analyzer);
  doc["ngram_range"] = {model.options().ngram_min, model.options().ngram_max};
  doc["max_features"] = model.options().max_features;
  auto& terms = doc["terms"] = nlohmann::json::array();
  for (std::size_t i = 0; i < model.size(); ++i) {
    terms.push_back({model.terms()[i], i, model.idf()[i]});
  }
  return doc.dump();
}

TfidfModel model_from_json(std::string_view json) {
  try {
    const auto doc = nlohmann::json::parse(json);
    if (doc.at("version").get<int>() != kModelVersion) {
      throw ContractError("unsupported tfidf model version");
    }
    TfidfOptions options;
    options.analyzer = parse_analyzer(doc.at("analyzer").get<std::string>());
    options.ngram_min = doc.at("ngram_range").at(0).get<int>();
    options.ngram_max = doc.at("ngram_range").at(1).get<int>();
    options.max_features = doc.at("max_features").get<std::size_t>();
    validate(options);
    const auto& entries = doc.at("terms");
    std::vector<std::string> terms(entries.size());
    std::vector<double> idf(entries.size());
    std::vector<bool> seen(entries.size(), false);
    for (const auto& entry : entries) {
      const auto index = entry.at(1).get<std::size_t>();
      if (index >= entries.size() || seen[index]) throw ContractError("tfidf term indices not dense");
      seen[index] = true;
      terms[index] = entry.at(0).get<std::string>();
      idf[index] = entry.at(2).get<double>();
    }
    return TfidfModel(options, std::move(terms), std::move(idf));
  } catch (const nlohmann::json::exception& e) {
    throw ContractError(std::string("malformed tfidf model: ") + e.what());
  }
}

void save_model(const TfidfModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << model_to_json(model) << '\n';
  if (!out) throw IoError("failed writing " + path.string());
}

TfidfModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return model_from_json(buffer.str());
}

}  // namespace dupliq::tfidf
