#pragma once

#include <nlohmann/json.hpp>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "dupliq/neural/tensor.hpp"

namespace dupliq::neural {

inline constexpr std::size_t kDefaultSequenceLength = 40;

/// Tokens fed to the networks: normalized, tokenized text.
std::vector<std::string> sequence_tokens(std::string_view text);

/// Word -> index with 0 reserved for padding. Indices follow descending
/// frequency, ties in lexicographic order.
class Vocabulary {
 public:
  Vocabulary() = default;
  /// max_words 0 keeps every word.
  static Vocabulary build(std::span<const std::string> texts, std::size_t max_words = 0);

  std::size_t size() const { return words_.size(); }
  /// size() + 1, counting the padding slot.
  std::size_t index_space() const { return words_.size() + 1; }
  /// 0 for unknown words.
  std::size_t index_of(std::string_view word) const;
  /// Word at index i >= 1.
  const std::string& word(std::size_t index) const { return words_.at(index - 1); }

  /// Known tokens in order, truncated to seq_len, then zero-padded at the end.
  std::vector<double> encode(std::string_view text, std::size_t seq_len) const;
  /// (texts, seq_len) index tensor.
  Tensor encode_batch(std::span<const std::string> texts, std::size_t seq_len) const;

  nlohmann::json to_json() const;
  static Vocabulary from_json(const nlohmann::json& doc);

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace dupliq::neural
