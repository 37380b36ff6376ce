#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <vector>

#include "dupliq/common.hpp"
#include "dupliq/rng.hpp"
#include "dupliq/stratify.hpp"
#include "dupliq/utf8.hpp"

using namespace dupliq;

TEST(Utf8, DecodesMultibyteScalars) {
  EXPECT_EQ(utf8::decode("a\xC3\xA9\xE2\x82\xAC"), std::u32string({U'a', U'é', U'€'}));
  EXPECT_EQ(utf8::length("caf\xC3\xA9"), 4u);
  EXPECT_EQ(utf8::encode(utf8::decode("na\xC3\xAFve")), "na\xC3\xAFve");
}

TEST(Utf8, InvalidBytesBecomeReplacementCharacters) {
  const std::u32string d = utf8::decode("a\xFF" "b");
  ASSERT_EQ(d.size(), 3u);
  EXPECT_EQ(d[1], U'�');
  EXPECT_EQ(utf8::length("a\xFF" "b"), 3u);
}

TEST(Utf8, LowercasesAndClassifies) {
  EXPECT_EQ(utf8::to_lower("HeLLo \xC3\x89T\xC3\x89"), "hello \xC3\xA9t\xC3\xA9");
  EXPECT_TRUE(utf8::is_space(U'\t'));
  EXPECT_TRUE(utf8::is_space(U' '));
  EXPECT_TRUE(utf8::is_alnum(U'7'));
  EXPECT_FALSE(utf8::is_alnum(U'?'));
  EXPECT_TRUE(utf8::is_alnum(U'é'));
}

TEST(Format, ShortestRoundTrip) {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5, 123456789.125, 0.0}) {
    EXPECT_EQ(parse_double(format_double(v), "v"), v);
  }
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(2.0), "2");
}

TEST(Parse, RejectsTrailingGarbage) {
  EXPECT_THROW(parse_double("1.5x", "cell"), ContractError);
  EXPECT_THROW(parse_double("", "cell"), ContractError);
  EXPECT_THROW(parse_integer("12a", "id"), ContractError);
  EXPECT_EQ(parse_integer("-42", "id"), -42);
}

TEST(ParallelFor, CoversEveryIndexOnce) {
  set_thread_count(4);
  std::vector<std::atomic<int>> hits(1000);
  parallel_for(hits.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) ++hits[i];
  }, 7);
  for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
  set_thread_count(0);
  EXPECT_GE(thread_count(), 1u);
}

TEST(Rng, SameSeedSameStream) {
  Rng a(9), b(9);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next(), b.next());
  Rng c(1);
  for (int i = 0; i < 1000; ++i) {
    const double u = c.uniform();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
    EXPECT_LT(c.below(7), 7u);
  }
}

TEST(StratifiedIndices, QuotaAndPartition) {
  std::vector<int> y(100, 0);
  for (int i = 0; i < 37; ++i) y[static_cast<std::size_t>(i * 2)] = 1;
  const IndexSplit s = stratified_indices(y, 0.2, 3);
  EXPECT_EQ(s.test.size(), 20u);
  EXPECT_EQ(s.train.size(), 80u);
  int pos = 0;
  for (auto i : s.test) pos += y[i];
  EXPECT_TRUE(pos == 7 || pos == 8);
  std::vector<int> seen(100, 0);
  for (auto i : s.train) ++seen[i];
  for (auto i : s.test) ++seen[i];
  for (int c : seen) EXPECT_EQ(c, 1);
  EXPECT_TRUE(std::is_sorted(s.test.begin(), s.test.end()));
}

TEST(StratifiedIndices, Contract) {
  const std::vector<int> y = {0, 1, 0, 1};
  EXPECT_THROW(stratified_indices(y, 0.0, 1), ContractError);
  EXPECT_THROW(stratified_indices(y, 1.0, 1), ContractError);
  const std::vector<int> lonely = {0, 0, 0, 1};
  EXPECT_THROW(stratified_indices(lonely, 0.5, 1), ContractError);
}
