#include <gtest/gtest.h>

#include <nlohmann/json.hpp>
#include <sstream>

#include "dupliq/cli.hpp"
#include "dupliq/corpus.hpp"
#include "synthetic.hpp"

using dupliq::cli::run;

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  Result r;
  r.code = run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::size_t count_lines(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) n += line.find(needle) != std::string::npos;
  return n;
}

// Synthetic corpus, vectors and report directory shared by the tests below.
class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dupliq::corpus::save_pairs(synth::question_pairs(300, 21, 6), dir / "pairs.tsv");
    synth::write_glove(synth::word_vectors(synth::topic_words(), 6, 5), dir / "glove.txt");
  }

  std::string path(const std::string& name) const { return (dir / name).string(); }

  Result cmd(std::vector<std::string> args) const {
    args.insert(args.begin(), {"--report-dir", path("reports")});
    return invoke(std::move(args));
  }

  nlohmann::json report(const std::string& name) const {
    return nlohmann::json::parse(synth::read_file(dir / "reports" / (name + ".json")));
  }

  synth::TempDir dir;
};

}  // namespace

TEST_F(CliTest, FeaturePipelineEndToEnd) {
  Result r = cmd({"clean", "--data", path("pairs.tsv"), "--out", path("clean.tsv")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(dupliq::corpus::load_pairs(dir / "clean.tsv").size(), 300u);
  EXPECT_EQ(report("clean").at("result").at("removed"), 6);

  r = cmd({"split", "--data", path("clean.tsv"), "--seed", "3", "--test", "0.2", "--train-out", path("train.tsv"),
           "--test-out", path("test.tsv")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(dupliq::corpus::load_pairs(dir / "test.tsv").size(), 60u);

  for (const char* side : {"train", "test"}) {
    r = cmd({"featurize", "--data", path(std::string(side) + ".tsv"), "--glove", path("glove.txt"), "--out",
             path(std::string(side) + ".csv")});
    ASSERT_EQ(r.code, 0) << r.err;
  }

  r = cmd({"train", "--model", "xgb", "--features", path("train.csv"), "--out", path("xgb.json"), "--set",
           "n_estimators=20"});
  ASSERT_EQ(r.code, 0) << r.err;

  r = cmd({"eval", "--model-file", path("xgb.json"), "--features", path("test.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("Accuracy"), std::string::npos) << r.out;
  const double acc = report("eval").at("result").at("metrics").at("accuracy");
  EXPECT_GT(acc, 0.6);

  r = cmd({"importance", "--model-file", path("xgb.json"), "--features", path("test.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(count_lines(r.out, "ratio"), 7u);
  EXPECT_EQ(report("importance").at("result").at("ranked").size(), 28u);

  synth::write_file(dir / "grid.json",
                    R"([{"kind":"decision_tree","hyperparameters":{"max_depth":1}},
                        {"kind":"decision_tree","hyperparameters":{"max_depth":4}}])");
  r = cmd({"grid", "--spec", path("grid.json"), "--features", path("train.csv"), "--drop-low-importance"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(report("grid").at("result").at("table").size(), 2u);
}

TEST_F(CliTest, TfidfPipeline) {
  Result r = cmd({"tfidf-fit", "--data", path("pairs.tsv"), "--analyzer", "word", "--ngram-max", "2", "--out",
                  path("tfidf.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  r = cmd({"tfidf-featurize", "--data", path("pairs.tsv"), "--tfidf-model", path("tfidf.json"), "--out",
           path("pairs.svm")});
  ASSERT_EQ(r.code, 0) << r.err;
  r = cmd({"train", "--model", "knn", "--features", path("pairs.svm"), "--out", path("knn.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  r = cmd({"eval", "--model-file", path("knn.json"), "--features", path("pairs.svm")});
  ASSERT_EQ(r.code, 0) << r.err;
}

TEST_F(CliTest, ReproduceTableFiveIsStable) {
  const std::vector<std::string> args = {"reproduce", "table5", "--data", path("pairs.tsv"), "--glove",
                                         path("glove.txt"), "--sample", "200", "--seed", "4"};
  const Result first = cmd(args);
  ASSERT_EQ(first.code, 0) << first.err;
  EXPECT_NE(first.out.find("0.7417"), std::string::npos);
  const auto rows = report("reproduce_table5").at("result").at("rows");
  EXPECT_EQ(rows.size(), 7u);
  const std::string bytes = synth::read_file(dir / "reports" / "reproduce_table5.json");
  const Result second = cmd(args);
  ASSERT_EQ(second.code, 0) << second.err;
  EXPECT_EQ(synth::read_file(dir / "reports" / "reproduce_table5.json"), bytes);
  EXPECT_EQ(second.out, first.out);
}

TEST_F(CliTest, NeuralCommands) {
  Result r = cmd({"nn-build", "--arch", "4", "--toy", "--vocab-size", "20", "--glove-dim", "6"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_GT(report("nn-build").at("result").at("network").at("parameters").get<long long>(), 0);

  r = cmd({"nn-train", "--arch", "1", "--toy", "--toy-pairs", "64", "--epochs", "3", "--out", path("w")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(std::filesystem::exists(dir / "w.bin"));

  r = cmd({"nn-gradcheck", "--arch", "2", "--seed", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
}

TEST_F(CliTest, ErrorsMapToExitCodes) {
  Result r = cmd({"featurize", "--data", path("pairs.tsv"), "--out", path("x.csv")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("--glove"), std::string::npos) << r.err;

  EXPECT_EQ(cmd({"frobnicate"}).code, 1);
  EXPECT_EQ(cmd({}).code, 1);

  r = cmd({"stats", "--data", path("missing.tsv")});
  EXPECT_EQ(r.code, 2);
  EXPECT_FALSE(r.err.empty());

  EXPECT_EQ(cmd({"reproduce", "table9", "--data", path("pairs.tsv"), "--glove", path("glove.txt")}).code, 1);
  EXPECT_EQ(cmd({"train", "--model", "svm", "--features", path("pairs.tsv")}).code, 1);
}

TEST_F(CliTest, StatsReport) {
  const Result r = cmd({"stats", "--data", path("pairs.tsv")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto result = report("stats").at("result");
  EXPECT_EQ(result.at("total_pairs"), 306);
}
