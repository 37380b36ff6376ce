#include <gtest/gtest.h>

#include "dupliq/textops.hpp"

using namespace dupliq::textops;

TEST(Normalize, Examples) {
  EXPECT_EQ(normalize_text("How do I Learn?"), "how do i learn");
  EXPECT_EQ(normalize_text(""), "");
  EXPECT_EQ(normalize_text("a--b  c"), "a b c");
  EXPECT_EQ(normalize_text("  \tC++ vs. C#\n"), "c vs c");
}

TEST(Normalize, Idempotent) {
  for (const char* s : {"What's the BEST way?!", "x", "  ", "\xC3\x89t\xC3\xA9 -- caf\xC3\xA9", "a1_b2"}) {
    const std::string once = normalize_text(s);
    EXPECT_EQ(normalize_text(once), once);
  }
}

TEST(Tokenize, Examples) {
  EXPECT_EQ(tokenize("how do i learn"), (TokenList{"how", "do", "i", "learn"}));
  EXPECT_TRUE(tokenize("   ").empty());
  EXPECT_EQ(tokenize("a  b"), (TokenList{"a", "b"}));
  EXPECT_EQ(tokenize("x\ty\nz"), (TokenList{"x", "y", "z"}));
}

TEST(Stopwords, Examples) {
  EXPECT_EQ(remove_stopwords({"the", "cat"}), (TokenList{"cat"}));
  EXPECT_TRUE(remove_stopwords({}).empty());
  EXPECT_TRUE(remove_stopwords({"to", "to", "to"}).empty());
  EXPECT_EQ(stopwords().size(), 179u);
  EXPECT_TRUE(is_stopword("the"));
  EXPECT_FALSE(is_stopword("python"));
}

TEST(ContentTokens, NormalizesThenFilters) {
  EXPECT_EQ(content_tokens("What is the best way to learn Python?"), (TokenList{"best", "way", "learn", "python"}));
}

TEST(BasicFeatures, IdenticalInputs) {
  const BasicFeatures f = basic_features("what is ai", "what is ai");
  EXPECT_EQ(f.len_diff, 0);
  EXPECT_EQ(f.nwords_q1, 3);
  EXPECT_EQ(f.nwords_q2, 3);
  EXPECT_EQ(f.common_words, 3);
}

TEST(BasicFeatures, RepeatedWords) {
  const BasicFeatures f = basic_features("a b b", "b c");
  EXPECT_EQ(f.nwords_q1, 3);
  EXPECT_EQ(f.nwords_q2, 2);
  EXPECT_EQ(f.common_words, 1);
}

TEST(BasicFeatures, LengthsCountWhitespace) {
  const BasicFeatures f = basic_features("ab cd", "x");
  EXPECT_EQ(f.len_q1, 5);
  EXPECT_EQ(f.nchar_q1, 4);
  EXPECT_EQ(f.len_diff, 4);
  EXPECT_LE(f.nchar_q2, f.len_q2);
}

TEST(BasicFeatures, CommonWordsSymmetricAndCaseFree) {
  const BasicFeatures a = basic_features("Is Python fun?", "python IS hard");
  const BasicFeatures b = basic_features("python IS hard", "Is Python fun?");
  EXPECT_EQ(a.common_words, 2);
  EXPECT_EQ(a.common_words, b.common_words);
}
