#include "dupliq/textops.hpp"

#include <algorithm>
#include <set>

#include "dupliq/utf8.hpp"

namespace dupliq::textops {

std::string normalize_text(std::string_view text) {
  std::u32string out;
  bool pending_space = false;
  for (char32_t c : utf8::decode(text)) {
    if (utf8::is_alnum(c)) {
      if (pending_space && !out.empty()) out.push_back(U' ');
      pending_space = false;
      out.push_back(utf8::to_lower(c));
    } else {
      pending_space = true;
    }
  }
  return utf8::encode(out);
}

TokenList tokenize(std::string_view text) {
  TokenList tokens;
  std::u32string current;
  for (char32_t c : utf8::decode(text)) {
    if (utf8::is_space(c)) {
      if (!current.empty()) tokens.push_back(utf8::encode(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  if (!current.empty()) tokens.push_back(utf8::encode(current));
  return tokens;
}

TokenList remove_stopwords(const TokenList& tokens) {
  TokenList kept;
  kept.reserve(tokens.size());
  std::copy_if(tokens.begin(), tokens.end(), std::back_inserter(kept),
               [](const std::string& t) { return !is_stopword(t); });
  return kept;
}

TokenList content_tokens(std::string_view text) {
  return remove_stopwords(tokenize(normalize_text(text)));
}

BasicFeatures basic_features(std::string_view q1, std::string_view q2) {
  const auto count_chars = [](std::string_view text, double& len, double& nchar) {
    const std::u32string scalars = utf8::decode(text);
    len = static_cast<double>(scalars.size());
    nchar = static_cast<double>(
        std::count_if(scalars.begin(), scalars.end(), [](char32_t c) { return !utf8::is_space(c); }));
  };

  BasicFeatures f;
  count_chars(q1, f.len_q1, f.nchar_q1);
  count_chars(q2, f.len_q2, f.nchar_q2);
  f.len_diff = f.len_q1 - f.len_q2;
  f.nwords_q1 = static_cast<double>(tokenize(q1).size());
  f.nwords_q2 = static_cast<double>(tokenize(q2).size());

  const auto w1 = tokenize(normalize_text(q1));
  const auto w2 = tokenize(normalize_text(q2));
  const std::set<std::string> s1(w1.begin(), w1.end());
  const std::set<std::string> s2(w2.begin(), w2.end());
  std::size_t common = 0;
  for (const auto& w : s1) common += s2.count(w);
  f.common_words = static_cast<double>(common);
  return f;
}

}  // namespace dupliq::textops
