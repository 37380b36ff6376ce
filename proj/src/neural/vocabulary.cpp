#include "dupliq/neural/vocabulary.hpp"

#include <algorithm>
#include <map>

#include "dupliq/common.hpp"
#include "dupliq/textops.hpp"

namespace dupliq::neural {

std::vector<std::string> sequence_tokens(std::string_view text) {
  return textops::tokenize(textops::normalize_text(text));
}

Vocabulary Vocabulary::build(std::span<const std::string> texts, std::size_t max_words) {
  std::map<std::string, std::size_t> counts;
  for (const std::string& text : texts) {
    for (std::string& token : sequence_tokens(text)) ++counts[std::move(token)];
  }
  std::vector<std::pair<std::string, std::size_t>> ordered(counts.begin(), counts.end());
  std::stable_sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  if (max_words > 0 && ordered.size() > max_words) ordered.resize(max_words);
  Vocabulary vocab;
  for (auto& [word, count] : ordered) {
    vocab.words_.push_back(word);
    vocab.index_.emplace(word, vocab.words_.size());
  }
  return vocab;
}

std::size_t Vocabulary::index_of(std::string_view word) const {
  const auto it = index_.find(std::string(word));
  return it == index_.end() ? 0 : it->second;
}

std::vector<double> Vocabulary::encode(std::string_view text, std::size_t seq_len) const {
  std::vector<double> out(seq_len, 0.0);
  std::size_t n = 0;
  for (const std::string& token : sequence_tokens(text)) {
    if (n == seq_len) break;
    const std::size_t index = index_of(token);
    if (index != 0) out[n++] = static_cast<double>(index);
  }
  return out;
}

Tensor Vocabulary::encode_batch(std::span<const std::string> texts, std::size_t seq_len) const {
  Tensor out({texts.size(), seq_len});
  for (std::size_t i = 0; i < texts.size(); ++i) {
    const auto row = encode(texts[i], seq_len);
    std::copy(row.begin(), row.end(), out.data.begin() + static_cast<std::ptrdiff_t>(i * seq_len));
  }
  return out;
}

nlohmann::json Vocabulary::to_json() const { return {{"version", 1}, {"words", words_}}; }

Vocabulary Vocabulary::from_json(const nlohmann::json& doc) {
  Vocabulary vocab;
  try {
    for (const auto& word : doc.at("words")) {
      vocab.words_.push_back(word.get<std::string>());
      if (!vocab.index_.emplace(vocab.words_.back(), vocab.words_.size()).second) {
        throw ContractError("duplicate vocabulary word '" + vocab.words_.back() + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ContractError(std::string("malformed vocabulary: ") + e.what());
  }
  return vocab;
}

}  // namespace dupliq::neural
