#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dupliq::textops {

using TokenList = std::vector<std::string>;

/// Lowercase, map every non-alphanumeric scalar to a space, trim and
/// collapse whitespace runs. Idempotent.
std::string normalize_text(std::string_view text);

/// Splits on unicode whitespace; never yields empty tokens.
TokenList tokenize(std::string_view text);

/// Bundled English stop-word list (179 entries, the common NLTK set).
std::span<const std::string_view> stopwords();
bool is_stopword(std::string_view token);

/// Drops stop words, keeping survivors in order. Tokens must be lowercase.
TokenList remove_stopwords(const TokenList& tokens);

/// Lowercased, stop-word-free tokens of normalize_text(text); the token
/// stream behind every embedding-based feature.
TokenList content_tokens(std::string_view text);

struct BasicFeatures {
  double len_q1 = 0;        // unicode scalars, whitespace included
  double len_q2 = 0;
  double len_diff = 0;      // len_q1 - len_q2
  double nchar_q1 = 0;      // non-whitespace scalars
  double nchar_q2 = 0;
  double nwords_q1 = 0;     // raw whitespace tokens, repeats counted
  double nwords_q2 = 0;
  double common_words = 0;  // distinct shared tokens of the normalized texts
};

BasicFeatures basic_features(std::string_view q1, std::string_view q2);

}  // namespace dupliq::textops
