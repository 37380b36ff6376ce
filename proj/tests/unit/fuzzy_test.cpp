#include <gtest/gtest.h>

#include <string>

#include "dupliq/fuzzy.hpp"
#include "dupliq/rng.hpp"
#include "dupliq/utf8.hpp"
#include "oracles.hpp"

using namespace dupliq::fuzzy;

namespace {

std::string random_text(dupliq::Rng& rng, std::size_t max_len) {
  static const std::string alphabet = "abcab c?A";
  std::string s;
  const std::size_t n = rng.below(max_len + 1);
  for (std::size_t i = 0; i < n; ++i) s += alphabet[rng.below(alphabet.size())];
  return s;
}

}  // namespace

TEST(Lcs, MatchesDynamicProgramming) {
  dupliq::Rng rng(5);
  for (int i = 0; i < 2000; ++i) {
    // Lengths past 64 exercise the multi-word bit vectors.
    const std::string a = random_text(rng, i % 10 == 0 ? 150 : 20);
    const std::string b = random_text(rng, i % 7 == 0 ? 150 : 20);
    const auto ua = dupliq::utf8::decode(a), ub = dupliq::utf8::decode(b);
    ASSERT_EQ(lcs_length(ua, ub), oracle::lcs(ua, ub)) << a << " | " << b;
  }
}

TEST(Ratio, RoundsHalfAwayFromZero) {
  EXPECT_EQ(ratio_from_lcs(0, 0), 100);
  EXPECT_EQ(ratio_from_lcs(1, 8), 25);
  EXPECT_EQ(ratio_from_lcs(1, 400), 1);   // 0.5 -> 1
  EXPECT_EQ(ratio_from_lcs(3, 8), 75);
}

TEST(IndelRatio, Examples) {
  EXPECT_EQ(indel_ratio("abc", "abc"), 100);
  EXPECT_EQ(indel_ratio("abc", "xyz"), 0);
  EXPECT_EQ(indel_ratio("abcd", "abce"), 75);
  EXPECT_EQ(indel_ratio("", ""), 100);
  EXPECT_EQ(indel_ratio("a", ""), 0);
}

TEST(PartialRatio, Examples) {
  EXPECT_EQ(partial_ratio("abc", "zzabczz"), 100);
  EXPECT_EQ(partial_ratio("abx", "zzabczz"), 67);
  EXPECT_EQ(partial_ratio("", "abc"), 0);
  EXPECT_EQ(partial_ratio("", ""), 100);
}

TEST(PartialRatio, Symmetric) {
  dupliq::Rng rng(17);
  for (int i = 0; i < 500; ++i) {
    const std::string a = random_text(rng, 12), b = random_text(rng, 12);
    EXPECT_EQ(partial_ratio(a, b), partial_ratio(b, a)) << a << " | " << b;
  }
}

TEST(TokenSortRatio, Examples) {
  EXPECT_EQ(token_sort_ratio("a b", "b a c"), oracle::token_sort("a b", "b a c", false));
  EXPECT_EQ(token_sort_ratio("a b", "b a c"), 75);
  EXPECT_EQ(token_sort_ratio("", ""), 100);
  EXPECT_EQ(token_sort_ratio("Python, learn!", "learn python"), 100);
}

TEST(TokenSetRatio, Examples) {
  EXPECT_EQ(token_set_ratio("new york is big", "big new york"), 100);
  EXPECT_EQ(token_set_ratio("a", "b"), 0);
  EXPECT_EQ(token_set_ratio("", ""), 100);
  EXPECT_EQ(token_set_ratio("?", "a"), 0);
}

TEST(Wratio, Examples) {
  EXPECT_EQ(wratio("a", ""), 0);
  EXPECT_EQ(wratio("", ""), 100);
  EXPECT_EQ(wratio("same thing", "Same thing!"), 100);
  const char* q1 = "How do I learn Python?";
  const char* q2 = "How can I learn Python?";
  EXPECT_EQ(wratio(q1, q2), oracle::wratio(q1, q2));
  EXPECT_EQ(qratio(q1, q2), oracle::indel(oracle::normalize(q1), oracle::normalize(q2)));
}

TEST(Wratio, LongShortBranchUsesPartialScale) {
  // Length ratio 10 selects the long-partial weight.
  const std::string shorter = "abc";
  const std::string longer = "zz abc zzzz zzzz zzzz zzzz";
  EXPECT_EQ(wratio(shorter, longer), oracle::wratio(shorter, longer));
  EXPECT_EQ(wratio(shorter, longer), 60);
}

TEST(Ratios, AgreeWithOracleOnRandomPairs) {
  dupliq::Rng rng(23);
  for (int i = 0; i < 2000; ++i) {
    const std::string a = random_text(rng, 12), b = random_text(rng, 12);
    ASSERT_EQ(indel_ratio(a, b), oracle::indel(a, b)) << a << " | " << b;
    ASSERT_EQ(partial_ratio(a, b), oracle::partial(a, b)) << a << " | " << b;
    ASSERT_EQ(token_sort_ratio(a, b), oracle::token_sort(a, b, false)) << a << " | " << b;
    ASSERT_EQ(token_sort_ratio(a, b, true), oracle::token_sort(a, b, true)) << a << " | " << b;
    ASSERT_EQ(token_set_ratio(a, b), oracle::token_set(a, b, false)) << a << " | " << b;
    ASSERT_EQ(token_set_ratio(a, b, true), oracle::token_set(a, b, true)) << a << " | " << b;
    ASSERT_EQ(wratio(a, b), oracle::wratio(a, b)) << a << " | " << b;
  }
}

TEST(FuzzyFeatures, IdenticalIsAllHundred) {
  const FuzzyFeatures f = fuzzy_features("What is love?", "What is love?");
  for (double v : {f.qratio, f.wratio, f.partial_ratio, f.token_set_ratio, f.token_sort_ratio,
                   f.partial_token_set_ratio, f.partial_token_sort_ratio}) {
    EXPECT_EQ(v, 100);
  }
}

TEST(FuzzyFeatures, EmptyAgainstTextIsAllZero) {
  const FuzzyFeatures f = fuzzy_features("", "x");
  for (double v : {f.qratio, f.wratio, f.partial_ratio, f.token_set_ratio, f.token_sort_ratio,
                   f.partial_token_set_ratio, f.partial_token_sort_ratio}) {
    EXPECT_EQ(v, 0);
  }
}

TEST(FuzzyFeatures, RangeAndUnicode) {
  const FuzzyFeatures f = fuzzy_features("caf\xC3\xA9 cr\xC3\xA8me", "cafe creme");
  for (double v : {f.qratio, f.wratio, f.partial_ratio, f.token_set_ratio, f.token_sort_ratio,
                   f.partial_token_set_ratio, f.partial_token_sort_ratio}) {
    EXPECT_GE(v, 0);
    EXPECT_LE(v, 100);
  }
  // 8 of 10 scalars in common on each side.
  EXPECT_EQ(f.qratio, 80);
}
