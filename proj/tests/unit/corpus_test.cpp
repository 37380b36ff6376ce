#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "dupliq/common.hpp"
#include "dupliq/corpus.hpp"
#include "synthetic.hpp"

using namespace dupliq;
using namespace dupliq::corpus;

namespace {

const char* kHeader = "id\tqid1\tqid2\tquestion1\tquestion2\tis_duplicate\n";

QuestionPair pair_of(std::int64_t id, std::string q1, std::string q2, int label) {
  QuestionPair p;
  p.row_id = id;
  p.qid1 = 2 * id;
  p.qid2 = 2 * id + 1;
  p.question1 = std::move(q1);
  p.question2 = std::move(q2);
  p.is_duplicate = label;
  return p;
}

PairTable balanced(std::size_t n, std::size_t positives) {
  PairTable t;
  for (std::size_t i = 0; i < n; ++i) {
    t.rows.push_back(pair_of(static_cast<std::int64_t>(i), "question number " + std::to_string(i),
                             "another question", i < positives ? 1 : 0));
  }
  return t;
}

}  // namespace

TEST(LoadPairs, HeaderOnlyIsEmpty) {
  EXPECT_TRUE(parse_pairs(kHeader).empty());
}

TEST(LoadPairs, ParsesRowsInOrder) {
  const PairTable t = parse_pairs(std::string(kHeader) +
                                  "0\t1\t2\tWhat is AI?\tWhat is A.I.?\t1\n"
                                  "1\t3\t4\tHow to cook?\tWhere is Paris?\t0\n");
  ASSERT_EQ(t.size(), 2u);
  EXPECT_EQ(t.rows[0].question2, "What is A.I.?");
  EXPECT_EQ(t.rows[1].qid2, 4);
  EXPECT_EQ(t.labels(), (std::vector<int>{1, 0}));
}

TEST(LoadPairs, QuotedFieldsKeepTabsNewlinesAndQuotes) {
  const PairTable t = parse_pairs(std::string(kHeader) + "7\t1\t2\t\"line one\nline\ttwo\"\t\"say \"\"hi\"\"\"\t0\n");
  ASSERT_EQ(t.size(), 1u);
  EXPECT_EQ(t.rows[0].question1, "line one\nline\ttwo");
  EXPECT_EQ(t.rows[0].question2, "say \"hi\"");
}

TEST(LoadPairs, BadLabelNamesTheLine) {
  const std::string text = std::string(kHeader) + "0\t1\t2\ta question\tb question\t1\n" +
                           "1\t3\t4\tc question\td question\t2\n";
  try {
    parse_pairs(text);
    FAIL() << "expected a row error";
  } catch (const ContractError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

TEST(LoadPairs, WrongFieldCountIsAnError) {
  EXPECT_THROW(parse_pairs(std::string(kHeader) + "0\t1\t2\tonly four\n"), ContractError);
}

TEST(LoadPairs, SkipBadRowsReportsThem) {
  const std::string text = std::string(kHeader) + "0\t1\t2\tfine question\tfine too\t1\n" +
                           "1\t3\t4\tbroken\tlabel\tyes\n" + "2\t5\t6\tgood question\tgood one\t0\n";
  std::vector<RowIssue> issues;
  const PairTable t = parse_pairs(text, {true}, &issues);
  EXPECT_EQ(t.size(), 2u);
  ASSERT_EQ(issues.size(), 1u);
  EXPECT_EQ(issues[0].line, 3u);
}

TEST(LoadPairs, MissingFileIsIoError) {
  EXPECT_THROW(load_pairs("/nonexistent/pairs.tsv"), IoError);
}

TEST(LoadPairs, SaveThenLoadIsIdentity) {
  synth::TempDir dir;
  PairTable t = synth::question_pairs(50, 4);
  t.rows.push_back(pair_of(99, "has\ta tab", "has \"quotes\"\nand newline", 1));
  t.rows.push_back(pair_of(100, "", "empty partner", 0));
  save_pairs(t, dir / "p.tsv");
  EXPECT_EQ(load_pairs(dir / "p.tsv"), t);
}

TEST(Clean, DropsShortQuestions) {
  PairTable t;
  t.rows.push_back(pair_of(0, "?", "a longer question", 0));
  t.rows.push_back(pair_of(1, "abcdef", "ghijkl", 1));
  t.rows.push_back(pair_of(2, "abcde", "long enough", 1));
  t.rows.push_back(pair_of(3, "long enough", "a b c", 0));
  t.rows.push_back(pair_of(4, "caf\xC3\xA9 ", "menu!!", 0));  // 5 scalars, 6 bytes
  const PairTable c = clean(t);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c.rows[0].row_id, 1);
}

TEST(Clean, IsIdempotent) {
  const PairTable t = synth::question_pairs(200, 8, 10);
  const PairTable once = clean(t);
  EXPECT_EQ(once.size(), 200u);
  EXPECT_EQ(clean(once), once);
}

TEST(StratifiedSplit, DeterministicForSeed) {
  const PairTable t = balanced(10, 5);
  const SplitTables a = stratified_split(t, 0.2, 11);
  const SplitTables b = stratified_split(t, 0.2, 11);
  EXPECT_EQ(a.test, b.test);
  EXPECT_EQ(a.train, b.train);
  EXPECT_EQ(a.test.size(), 2u);
}

TEST(StratifiedSplit, ThirtySevenPercentPositives) {
  const PairTable t = balanced(100, 37);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const SplitTables s = stratified_split(t, 0.2, seed);
    ASSERT_EQ(s.test.size(), 20u);
    const auto labels = s.test.labels();
    const int positives = static_cast<int>(std::count(labels.begin(), labels.end(), 1));
    EXPECT_TRUE(positives == 7 || positives == 8) << positives;
  }
}

TEST(StratifiedSplit, PartitionsAndKeepsProportion) {
  const PairTable t = synth::question_pairs(1001, 5);
  const SplitTables s = stratified_split(t, 0.2, 3);
  EXPECT_EQ(s.test.size(), static_cast<std::size_t>(std::llround(0.2 * 1001)));
  std::multiset<std::int64_t> ids;
  for (const auto& r : s.train.rows) ids.insert(r.row_id);
  for (const auto& r : s.test.rows) ids.insert(r.row_id);
  EXPECT_EQ(ids.size(), t.size());
  for (const auto& r : t.rows) EXPECT_EQ(ids.count(r.row_id), 1u);
  const auto share = [](const PairTable& p) {
    const auto l = p.labels();
    return static_cast<double>(std::count(l.begin(), l.end(), 1)) / static_cast<double>(l.size());
  };
  EXPECT_LE(std::abs(share(s.test) - share(t)), 0.005);
}

TEST(StratifiedSplit, Contract) {
  EXPECT_THROW(stratified_split(balanced(10, 5), 1.5, 1), ContractError);
  EXPECT_THROW(stratified_split(balanced(10, 1), 0.2, 1), ContractError);
}

TEST(StratifiedSample, KeepsClassBalance) {
  const PairTable t = balanced(1000, 370);
  const PairTable s = stratified_sample(t, 100, 2);
  ASSERT_EQ(s.size(), 100u);
  const auto l = s.labels();
  EXPECT_EQ(std::count(l.begin(), l.end(), 1), 37);
  EXPECT_EQ(stratified_sample(t, 5000, 2), t);
}

TEST(CorpusStats, OccurrenceCountsBothColumns) {
  PairTable t;
  t.rows.push_back(pair_of(0, "abcdef", "abcdef", 1));
  const CorpusStats s = corpus_stats(t);
  EXPECT_EQ(s.question_occurrence.at("abcdef"), 2u);
  EXPECT_EQ(s.positives, 1u);
  EXPECT_EQ(s.occurrence_histogram().at(2), 1u);
}

TEST(CorpusStats, FieldsByDefinition) {
  PairTable t;
  t.rows.push_back(pair_of(0, "hi", "caf\xC3\xA9 au lait", 1));
  t.rows.push_back(pair_of(1, "what now", "ok?", 0));
  t.rows.push_back(pair_of(2, "twelve chars", "hi", 0));
  const CorpusStats s = corpus_stats(t);
  EXPECT_EQ(s.total_pairs, 3u);
  EXPECT_EQ(s.positives + s.negatives, s.total_pairs);
  EXPECT_EQ(s.sum_len_q1, 2u + 8u + 12u);
  EXPECT_EQ(s.sum_len_q2, 12u + 3u + 2u);
  EXPECT_EQ(s.max_len_q1, 12u);
  EXPECT_EQ(s.max_len_q2, 12u);
  EXPECT_EQ(s.short_q1, 1u);
  EXPECT_EQ(s.short_q2, 2u);
  EXPECT_DOUBLE_EQ(s.avg_len_q1, 22.0 / 3.0);
  EXPECT_EQ(s.question_occurrence.at("hi"), 2u);
}
