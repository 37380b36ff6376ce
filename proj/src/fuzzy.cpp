#include "dupliq/fuzzy.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <set>
#include <unordered_map>
#include <vector>

#include "dupliq/textops.hpp"
#include "dupliq/utf8.hpp"

namespace dupliq::fuzzy {
namespace {

// Match masks of a pattern: bit i of word i/64 is set where pattern[i] == c.
class PatternMasks {
 public:
  explicit PatternMasks(std::u32string_view pattern)
      : words_((pattern.size() + 63) / 64), ascii_(128 * words_, 0) {
    for (std::size_t i = 0; i < pattern.size(); ++i) {
      const char32_t c = pattern[i];
      std::uint64_t* row;
      if (c < 128) {
        row = &ascii_[c * words_];
      } else {
        auto& slot = other_[c];
        if (slot.empty()) slot.assign(words_, 0);
        row = slot.data();
      }
      row[i / 64] |= std::uint64_t{1} << (i % 64);
    }
  }

  std::size_t words() const { return words_; }

  const std::uint64_t* get(char32_t c) const {
    if (c < 128) return &ascii_[c * words_];
    auto it = other_.find(c);
    return it == other_.end() ? nullptr : it->second.data();
  }

 private:
  std::size_t words_;
  std::vector<std::uint64_t> ascii_;
  std::unordered_map<char32_t, std::vector<std::uint64_t>> other_;
};

// Hyyro-style bit-vector LCS of `pattern` (masks) against `text`.
std::size_t lcs_with_masks(const PatternMasks& masks, std::size_t pattern_len,
                           std::u32string_view text, std::vector<std::uint64_t>& v) {
  const std::size_t words = masks.words();
  v.assign(words, ~std::uint64_t{0});
  for (char32_t c : text) {
    const std::uint64_t* m = masks.get(c);
    if (m == nullptr) continue;
    std::uint64_t carry = 0;
    for (std::size_t w = 0; w < words; ++w) {
      const std::uint64_t u = v[w] & m[w];
      const std::uint64_t partial = v[w] + u;
      const std::uint64_t sum = partial + carry;
      carry = (partial < v[w] || sum < partial) ? 1 : 0;
      v[w] = sum | (v[w] - u);
    }
  }
  std::size_t lcs = 0;
  for (std::size_t w = 0; w < words; ++w) {
    std::uint64_t zeros = ~v[w];
    const std::size_t used = std::min<std::size_t>(64, pattern_len - w * 64);
    if (used < 64) zeros &= (std::uint64_t{1} << used) - 1;
    lcs += static_cast<std::size_t>(std::popcount(zeros));
  }
  return lcs;
}

int ratio_u32(std::u32string_view a, std::u32string_view b) {
  return ratio_from_lcs(lcs_length(a, b), a.size() + b.size());
}

int partial_u32(std::u32string_view s1, std::u32string_view s2) {
  if (s1.size() == s2.size()) return ratio_u32(s1, s2);
  const std::u32string_view shorter = s1.size() < s2.size() ? s1 : s2;
  const std::u32string_view longer = s1.size() < s2.size() ? s2 : s1;
  if (shorter.empty()) return 0;
  const PatternMasks masks(shorter);
  std::vector<std::uint64_t> scratch;
  std::size_t best = 0;
  for (std::size_t start = 0; start + shorter.size() <= longer.size(); ++start) {
    best = std::max(best,
                    lcs_with_masks(masks, shorter.size(), longer.substr(start, shorter.size()), scratch));
    if (best == shorter.size()) break;
  }
  return ratio_from_lcs(best, 2 * shorter.size());
}

int score(std::u32string_view a, std::u32string_view b, bool partial) {
  return partial ? partial_u32(a, b) : ratio_u32(a, b);
}

std::u32string join(const std::vector<std::string>& tokens) {
  std::string joined;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) joined.push_back(' ');
    joined += tokens[i];
  }
  return utf8::decode(joined);
}

std::vector<std::string> sorted_tokens(std::string_view text) {
  auto tokens = textops::tokenize(textops::normalize_text(text));
  std::sort(tokens.begin(), tokens.end());
  return tokens;
}

double round_half_away(double x) { return std::round(x); }

}  // namespace

std::size_t lcs_length(std::u32string_view a, std::u32string_view b) {
  if (a.empty() || b.empty()) return 0;
  const std::u32string_view pattern = a.size() <= b.size() ? a : b;
  const std::u32string_view text = a.size() <= b.size() ? b : a;
  const PatternMasks masks(pattern);
  std::vector<std::uint64_t> scratch;
  return lcs_with_masks(masks, pattern.size(), text, scratch);
}

int ratio_from_lcs(std::size_t lcs, std::size_t total) {
  if (total == 0) return 100;
  return static_cast<int>((400 * lcs + total) / (2 * total));
}

int indel_ratio(std::string_view s1, std::string_view s2) {
  return ratio_u32(utf8::decode(s1), utf8::decode(s2));
}

int partial_ratio(std::string_view s1, std::string_view s2) {
  return partial_u32(utf8::decode(s1), utf8::decode(s2));
}

int token_sort_ratio(std::string_view s1, std::string_view s2, bool partial) {
  return score(join(sorted_tokens(s1)), join(sorted_tokens(s2)), partial);
}

int token_set_ratio(std::string_view s1, std::string_view s2, bool partial) {
  const auto t1 = sorted_tokens(s1);
  const auto t2 = sorted_tokens(s2);
  if (t1.empty() && t2.empty()) return 100;
  if (t1.empty() || t2.empty()) return 0;

  const std::set<std::string> set1(t1.begin(), t1.end());
  const std::set<std::string> set2(t2.begin(), t2.end());
  std::vector<std::string> common, only1, only2;
  std::set_intersection(set1.begin(), set1.end(), set2.begin(), set2.end(),
                        std::back_inserter(common));
  std::set_difference(set1.begin(), set1.end(), set2.begin(), set2.end(),
                      std::back_inserter(only1));
  std::set_difference(set2.begin(), set2.end(), set1.begin(), set1.end(),
                      std::back_inserter(only2));

  const std::u32string base = join(common);
  const auto extend = [&](const std::vector<std::string>& rest) {
    std::u32string out = base;
    const std::u32string tail = join(rest);
    if (!out.empty() && !tail.empty()) out.push_back(U' ');
    out += tail;
    return out;
  };
  const std::u32string combined1 = extend(only1);
  const std::u32string combined2 = extend(only2);
  return std::max({score(base, combined1, partial), score(base, combined2, partial),
                   score(combined1, combined2, partial)});
}

int qratio(std::string_view s1, std::string_view s2) {
  return indel_ratio(textops::normalize_text(s1), textops::normalize_text(s2));
}

int wratio(std::string_view s1, std::string_view s2) {
  const std::string n1 = textops::normalize_text(s1);
  const std::string n2 = textops::normalize_text(s2);
  const std::size_t len1 = utf8::length(n1);
  const std::size_t len2 = utf8::length(n2);
  if (len1 == 0 && len2 == 0) return 100;
  if (len1 == 0 || len2 == 0) return 0;

  const double base = indel_ratio(n1, n2);
  const double length_ratio =
      static_cast<double>(std::max(len1, len2)) / static_cast<double>(std::min(len1, len2));

  if (length_ratio < kTokenBranchLengthRatio) {
    const double tsort = token_sort_ratio(n1, n2) * kUnbaseScale;
    const double tset = token_set_ratio(n1, n2) * kUnbaseScale;
    return static_cast<int>(round_half_away(std::max({base, tsort, tset})));
  }
  const double ps = length_ratio > kLongPartialLengthRatio ? kLongPartialScale : kPartialScale;
  const double partial = partial_ratio(n1, n2) * ps;
  const double ptsort = token_sort_ratio(n1, n2, true) * kUnbaseScale * ps;
  const double ptset = token_set_ratio(n1, n2, true) * kUnbaseScale * ps;
  return static_cast<int>(round_half_away(std::max({base, partial, ptsort, ptset})));
}

FuzzyFeatures fuzzy_features(std::string_view q1, std::string_view q2) {
  const std::string n1 = textops::normalize_text(q1);
  const std::string n2 = textops::normalize_text(q2);
  FuzzyFeatures f;
  f.qratio = indel_ratio(n1, n2);
  f.wratio = wratio(n1, n2);
  f.partial_ratio = partial_ratio(q1, q2);
  f.token_set_ratio = token_set_ratio(n1, n2, false);
  f.token_sort_ratio = token_sort_ratio(n1, n2, false);
  f.partial_token_set_ratio = token_set_ratio(n1, n2, true);
  f.partial_token_sort_ratio = token_sort_ratio(n1, n2, true);
  return f;
}

}  // namespace dupliq::fuzzy
