#include <gtest/gtest.h>

#include <cmath>

#include "dupliq/common.hpp"
#include "dupliq/tfidf.hpp"
#include "synthetic.hpp"

using namespace dupliq;
using namespace dupliq::tfidf;

namespace {

TfidfOptions words(int lo = 1, int hi = 1) {
  TfidfOptions o;
  o.analyzer = Analyzer::word;
  o.ngram_min = lo;
  o.ngram_max = hi;
  return o;
}

TfidfOptions chars(int lo, int hi, std::size_t max_features = 50000) {
  TfidfOptions o;
  o.analyzer = Analyzer::character;
  o.ngram_min = lo;
  o.ngram_max = hi;
  o.max_features = max_features;
  return o;
}

double norm(const SparseVec& v) {
  double s = 0;
  for (const auto& [i, x] : v.entries) s += x * x;
  return std::sqrt(s);
}

}  // namespace

TEST(Fit, SmoothedIdf) {
  const std::vector<std::string> docs = {"a b", "b c"};
  const TfidfModel m = fit(docs, words());
  EXPECT_EQ(m.terms(), (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_DOUBLE_EQ(m.idf()[1], 1.0);
  EXPECT_DOUBLE_EQ(m.idf()[0], std::log(1.5) + 1);
  EXPECT_DOUBLE_EQ(m.idf()[2], std::log(1.5) + 1);
}

TEST(Fit, CharacterNgrams) {
  const std::vector<std::string> one = {"ab"};
  EXPECT_EQ(fit(one, chars(1, 2)).terms(), (std::vector<std::string>{"a", "ab", "b"}));
  const std::vector<std::string> docs = {"ab", "bc"};
  EXPECT_EQ(fit(docs, chars(1, 1, 1)).terms(), (std::vector<std::string>{"b"}));
}

TEST(Fit, Contract) {
  EXPECT_THROW(fit(std::vector<std::string>{}, words()), ContractError);
  const std::vector<std::string> docs = {"a"};
  EXPECT_THROW(fit(docs, words(2, 1)), ContractError);
  EXPECT_THROW(fit(docs, words(0, 1)), ContractError);
}

TEST(Analyze, WordBigramsAndCharacters) {
  EXPECT_EQ(analyze("How are you?", words(1, 2)),
            (std::vector<std::string>{"how", "are", "you", "how are", "are you"}));
  EXPECT_EQ(analyze("Ab c", chars(2, 2)), (std::vector<std::string>{"ab", "b ", " c"}));
}

TEST(Transform, Examples) {
  const std::vector<std::string> docs = {"a b", "b c"};
  const TfidfModel m = fit(docs, words());
  const SparseVec single = m.transform("c");
  ASSERT_EQ(single.entries.size(), 1u);
  EXPECT_EQ(single.entries[0].first, 2u);
  EXPECT_DOUBLE_EQ(single.entries[0].second, 1.0);
  EXPECT_TRUE(m.transform("zzz").entries.empty());
  EXPECT_EQ(m.transform("zzz").dim, 3u);

  const SparseVec bc = m.transform("b c");
  const double idf_c = std::log(1.5) + 1;
  const double len = std::sqrt(1 + idf_c * idf_c);
  ASSERT_EQ(bc.entries.size(), 2u);
  EXPECT_DOUBLE_EQ(bc.entries[0].second, 1 / len);
  EXPECT_DOUBLE_EQ(bc.entries[1].second, idf_c / len);
}

TEST(Transform, UnitNormAndSortedIndices) {
  const auto table = synth::question_pairs(100, 2);
  std::vector<std::string> docs;
  for (const auto& r : table.rows) {
    docs.push_back(r.question1);
    docs.push_back(r.question2);
  }
  const TfidfModel m = fit(docs, chars(1, 3));
  for (const auto& d : docs) {
    const SparseVec v = m.transform(d);
    EXPECT_NEAR(norm(v), 1.0, 1e-12);
    for (std::size_t i = 1; i < v.entries.size(); ++i) EXPECT_LT(v.entries[i - 1].first, v.entries[i].first);
  }
}

TEST(Transform, IdenticalDocumentsGiveUnitIdf) {
  const std::vector<std::string> docs = {"x y", "x y", "x y"};
  const TfidfModel m = fit(docs, words());
  for (double w : m.idf()) EXPECT_DOUBLE_EQ(w, 1.0);
}

TEST(PairVector, HalvesAndMirror) {
  const std::vector<std::string> docs = {"a b", "b c"};
  const TfidfModel m = fit(docs, words());
  const SparseVec same = m.pair_vector("a", "a");
  EXPECT_EQ(same.dim, 6u);
  ASSERT_EQ(same.entries.size(), 2u);
  EXPECT_EQ(same.entries[0].first, 0u);
  EXPECT_EQ(same.entries[1].first, 3u);
  EXPECT_EQ(same.entries[0].second, same.entries[1].second);

  const SparseVec ab = m.pair_vector("a b", "c"), ba = m.pair_vector("c", "a b");
  const auto swap_halves = [](const SparseVec& v) {
    std::vector<std::pair<std::uint32_t, double>> out;
    const auto half = static_cast<std::uint32_t>(v.dim / 2);
    for (auto [i, x] : v.entries) out.emplace_back(i < half ? i + half : i - half, x);
    std::sort(out.begin(), out.end());
    return out;
  };
  EXPECT_EQ(swap_halves(ab), ba.entries);
}

TEST(Model, JsonRoundTrip) {
  synth::TempDir dir;
  const std::vector<std::string> docs = {"the cat sat", "a cat ran", "dogs ran"};
  const TfidfModel m = fit(docs, words(1, 2));
  save_model(m, dir / "t.json");
  const TfidfModel back = load_model(dir / "t.json");
  EXPECT_EQ(back.terms(), m.terms());
  EXPECT_EQ(back.idf(), m.idf());
  EXPECT_EQ(back.options().ngram_max, 2);
  EXPECT_EQ(back.index_of("cat"), m.index_of("cat"));
  EXPECT_EQ(m.index_of("nope"), -1);
  EXPECT_EQ(model_to_json(back), model_to_json(m));
  EXPECT_THROW(model_from_json("{\"version\": 99}"), ContractError);
  EXPECT_EQ(parse_analyzer(analyzer_name(Analyzer::character)), Analyzer::character);
  EXPECT_THROW(parse_analyzer("bytes"), ContractError);
}
