#include <CLI11.hpp>
#include <iostream>

#include "dupliq/cli.hpp"
#include "dupliq/common.hpp"
#include "internal.hpp"

namespace dupliq::cli {

namespace {

std::string find_config(const std::vector<std::string>& args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) return args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) return args[i].substr(9);
  }
  return {};
}

struct Flags {
  std::size_t threads = 0;
  std::string config;
  std::string table;
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  ExperimentConfig c;
  Flags flags;
  CLI::App app{"Duplicate question pair detection pipeline", "dupliq"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", version_string());
  app.add_option("--config", flags.config, "Experiment config JSON; flags override it");
  app.add_option("--threads", flags.threads, "Worker threads (default: DUPLIQ_THREADS or all cores)");
  app.add_option("--report-dir", c.report_dir, "Directory for JSON reports");

  const auto data = [&](CLI::App* s) { s->add_option("data,--data", c.data, "Question pair TSV"); };
  const auto seed = [&](CLI::App* s) { s->add_option("--seed", c.seed, "Random seed"); };
  const auto vectors = [&](CLI::App* s) {
    s->add_option("--glove", c.glove, "GloVe text vectors (.txt or .txt.gz)");
    s->add_option("--w2v", c.w2v, "word2vec binary vectors (.bin or .bin.gz)");
  };
  const auto tfidf = [&](CLI::App* s) {
    s->add_option("--analyzer", c.tfidf.analyzer, "word or char");
    s->add_option("--ngram-min", c.tfidf.ngram_min, "Smallest n-gram");
    s->add_option("--ngram-max", c.tfidf.ngram_max, "Largest n-gram");
    s->add_option("--max-features", c.tfidf.max_features, "Vocabulary cap");
  };
  const auto drops = [&](CLI::App* s) {
    s->add_option("--drop", c.drop, "Feature columns to drop");
    s->add_flag("--drop-low-importance", c.drop_low_importance, "Drop the eight low-importance features");
  };
  const auto hyper = [&](CLI::App* s) { s->add_option("--set", c.hyperparameters, "Hyperparameter override key=value"); };
  const auto nn = [&](CLI::App* s) {
    s->add_option("--arch", c.nn.arch, "Architecture 1-4");
    s->add_flag("--toy", c.nn.toy, "Toy dimensions");
    s->add_option("--head-blocks", c.nn.dims.head_blocks, "Repeated head blocks (0: architecture default)");
  };

  auto* stats = app.add_subcommand("stats", "Corpus statistics");
  data(stats);
  auto* clean = app.add_subcommand("clean", "Drop pairs with a short question");
  data(clean);
  clean->add_option("-o,--out", c.out, "Cleaned TSV");
  auto* split = app.add_subcommand("split", "Stratified train/test split");
  data(split);
  seed(split);
  split->add_option("--test", c.test_fraction, "Test fraction");
  split->add_option("--train-out", c.train_out, "Train TSV");
  split->add_option("--test-out", c.test_out, "Test TSV");
  auto* featurize = app.add_subcommand("featurize", "Extract the 28 engineered features");
  data(featurize);
  vectors(featurize);
  drops(featurize);
  featurize->add_option("-o,--out", c.out, "Feature CSV");
  auto* tfit = app.add_subcommand("tfidf-fit", "Fit a TF-IDF vectorizer on training pairs");
  data(tfit);
  tfidf(tfit);
  tfit->add_option("-o,--out", c.out, "Model JSON");
  auto* tfeat = app.add_subcommand("tfidf-featurize", "Write TF-IDF pair vectors as svmlight");
  data(tfeat);
  tfeat->add_option("--tfidf-model", c.tfidf_model, "Fitted TF-IDF model");
  tfeat->add_option("-o,--out", c.out, "svmlight output");
  auto* train = app.add_subcommand("train", "Train one classifier");
  train->add_option("--model", c.model, "knn, decision_tree, random_forest, extra_trees, adaboost, gbm or xgb");
  train->add_option("--features", c.features, "Feature CSV or svmlight file");
  train->add_option("-o,--out", c.out, "Model JSON");
  seed(train);
  drops(train);
  hyper(train);
  auto* eval = app.add_subcommand("eval", "Evaluate a saved classifier");
  eval->add_option("--model-file", c.model_file, "Model JSON");
  eval->add_option("--features", c.features, "Feature CSV or svmlight file");
  auto* importance = app.add_subcommand("importance", "Feature importance of a saved classifier");
  importance->add_option("--model-file", c.model_file, "Model JSON");
  importance->add_option("--features", c.features, "Feature CSV or svmlight file");
  importance->add_flag("--permutation", c.permutation, "Force permutation importance");
  importance->add_option("--repeats", c.repeats, "Permutation shuffles per feature");
  seed(importance);
  auto* grid = app.add_subcommand("grid", "Grid search on a validation slice of the training data");
  grid->add_option("--spec", c.grid_file, "Grid JSON: array of classifier specs");
  grid->add_option("--features", c.features, "Feature CSV or svmlight file");
  grid->add_option("--val-fraction", c.val_fraction, "Validation fraction");
  seed(grid);
  drops(grid);
  auto* nn_build = app.add_subcommand("nn-build", "Build a network and print its layers");
  nn(nn_build);
  seed(nn_build);
  nn_build->add_option("--vocab-size", c.nn.vocab_size, "Index space including padding");
  nn_build->add_option("--glove-dim", c.nn.glove_dim, "Frozen embedding width");
  auto* nn_train = app.add_subcommand("nn-train", "Train a network");
  nn(nn_train);
  seed(nn_train);
  data(nn_train);
  vectors(nn_train);
  nn_train->add_option("--epochs", c.nn.train.epochs, "Epochs");
  nn_train->add_option("--batch-size", c.nn.train.batch_size, "Batch size");
  nn_train->add_option("--learning-rate", c.nn.train.learning_rate, "Adam step size");
  nn_train->add_option("--toy-pairs", c.nn.toy_pairs, "Synthetic pairs for --toy");
  nn_train->add_option("--max-words", c.nn.max_words, "Vocabulary cap (0: all)");
  nn_train->add_option("-o,--out", c.out, "Weights stem (writes .bin and .json)");
  auto* nn_check = app.add_subcommand("nn-gradcheck", "Finite-difference gradient check on a toy build");
  nn(nn_check);
  seed(nn_check);
  auto* reproduce = app.add_subcommand("reproduce", "Rerun a results table end to end");
  reproduce->add_option("table", flags.table, "table5, table6 or table7")->required();
  data(reproduce);
  vectors(reproduce);
  seed(reproduce);
  tfidf(reproduce);
  hyper(reproduce);
  reproduce->add_option("--sample", c.sample, "Stratified subsample size (0: all pairs)");
  reproduce->add_option("--test", c.test_fraction, "Test fraction");
  reproduce->add_option("--models", c.models, "Classifier kinds (default: all seven)");

  try {
    const std::string config_path = find_config(args);
    if (!config_path.empty()) c = load_config(config_path);
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitContract;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitContract;
  }

  try {
    if (flags.threads > 0) set_thread_count(flags.threads);
    CLI::App* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    if (name == "nn-train" && c.nn.toy && nn_train->count("--batch-size") == 0 && flags.config.empty()) {
      c.nn.train.batch_size = 32;
    }
    nlohmann::json result;
    std::string report_name = name;
    if (name == "stats") result = cmd_stats(c, out);
    else if (name == "clean") result = cmd_clean(c, out);
    else if (name == "split") result = cmd_split(c, out);
    else if (name == "featurize") result = cmd_featurize(c, out);
    else if (name == "tfidf-fit") result = cmd_tfidf_fit(c, out);
    else if (name == "tfidf-featurize") result = cmd_tfidf_featurize(c, out);
    else if (name == "train") result = cmd_train(c, out);
    else if (name == "eval") result = cmd_eval(c, out);
    else if (name == "importance") result = cmd_importance(c, out);
    else if (name == "grid") result = cmd_grid(c, out);
    else if (name == "nn-build") result = cmd_nn_build(c, out);
    else if (name == "nn-train") result = cmd_nn_train(c, out);
    else if (name == "nn-gradcheck") result = cmd_nn_gradcheck(c, out);
    else {
      result = cmd_reproduce(flags.table, c, out);
      report_name = "reproduce_" + flags.table;
    }
    write_report(c, report_name, make_report(name, c, result));
    return kExitOk;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitContract;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitContract;
  }
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace dupliq::cli
