#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "dupliq/common.hpp"
#include "dupliq/neural.hpp"
#include "neural_checks.hpp"
#include "synthetic.hpp"

using namespace dupliq;
using namespace dupliq::neural;
using nncheck::expected_parameters;
using nncheck::expected_trainable;
using nncheck::layer_gradcheck;
using nncheck::random_tensor;

namespace {

Tensor indices(std::size_t b, std::size_t t, std::size_t vocab, Rng& rng) {
  Tensor x({b, t});
  for (double& v : x.data) v = static_cast<double>(rng.below(vocab));
  return x;
}

// Input (B, T) -> frozen-free embedding -> sum over time -> head.
Network micro_net(std::vector<LayerPtr> head, std::size_t dim = 2) {
  Tensor table({4, dim}, std::vector<double>(4 * dim, 0.0));
  for (std::size_t i = 0; i < table.size(); ++i) table[i] = 0.1 * static_cast<double>(i % 7) - 0.2;
  std::vector<Branch> branches;
  Branch b{0, {}};
  b.layers.push_back(std::make_unique<Embedding>(table, false));
  b.layers.push_back(std::make_unique<LambdaSum>());
  branches.push_back(std::move(b));
  head.push_back(std::make_unique<Sigmoid>());
  return Network(std::move(branches), std::move(head), 1, 3, 1);
}

Parameter* find_param(Network& net, const std::string& name, std::size_t nth = 0) {
  for (Parameter* p : net.parameters()) {
    if (p->name == name && nth-- == 0) return p;
  }
  return nullptr;
}

}  // namespace

TEST(Architecture, DefaultShapes) {
  Network a1 = build_architecture(1, 10, 0, ArchDims{}, 0);
  EXPECT_EQ(a1.input_count(), 2u);
  EXPECT_EQ(a1.sequence_length(), 40u);
  EXPECT_EQ(a1.merge_width(), 600u);
  const std::vector<Tensor> in = {Tensor({1, 40}), Tensor({1, 40})};
  const Tensor z = a1.logits(in, Mode::infer);
  EXPECT_EQ(z.shape, (std::vector<std::size_t>{1, 1}));
  EXPECT_EQ(build_architecture(4, 10, 6, ArchDims{}, 0).branch_count(), 6u);
  EXPECT_THROW(build_architecture(5, 10, 6, ArchDims{}, 0), ContractError);
  EXPECT_THROW(build_architecture(2, 10, 0, ArchDims{}, 0), ContractError);
}

TEST(Architecture, ParameterCountsMatchClosedForm) {
  const ArchDims d = ArchDims::toy();
  for (int id = 1; id <= kArchitectureCount; ++id) {
    Network net = build_architecture(id, 20, 6, d, 3);
    EXPECT_EQ(net.parameter_count(), expected_parameters(id, 20, 6, d)) << id;
    EXPECT_EQ(net.trainable_parameter_count(), expected_trainable(id, 20, 6, d)) << id;
  }
  ArchDims deep = d;
  deep.head_blocks = 2;
  EXPECT_EQ(build_architecture(3, 20, 6, deep, 3).parameter_count(), expected_parameters(3, 20, 6, deep));
}

TEST(Architecture, FromVocabularyAndGlove) {
  const std::vector<std::string> texts = {"learn python fast", "python is fun"};
  const Vocabulary vocab = Vocabulary::build(texts);
  embed::EmbeddingTable glove(3);
  glove.add("python", std::vector<float>{1, 2, 3});
  Network net = build_architecture(2, vocab, &glove, ArchDims::toy(), 0);
  const auto p = net.parameters();
  const auto frozen = std::find_if(p.begin(), p.end(), [](Parameter* q) { return !q->trainable; });
  ASSERT_NE(frozen, p.end());
  const std::size_t row = vocab.index_of("python");
  EXPECT_EQ((*frozen)->value[row * 3 + 2], 3.0);
  EXPECT_EQ((*frozen)->value[vocab.index_of("fun") * 3], 0.0);
  EXPECT_THROW(build_architecture(3, vocab, nullptr, ArchDims::toy(), 0), ContractError);
}

TEST(Network, AllZeroWeightsGiveOneHalf) {
  Network net = build_architecture(1, 12, 0, ArchDims::toy(), 2);
  for (Parameter* p : net.parameters()) {
    if (p->trainable) std::fill(p->value.data.begin(), p->value.data.end(), 0.0);
  }
  Rng rng(1);
  const std::vector<Tensor> in = {indices(3, 5, 12, rng), indices(3, 5, 12, rng)};
  for (double p : net.forward(in, Mode::infer)) EXPECT_EQ(p, 0.5);
}

TEST(Network, MicroNetMatchesHandCalculation) {
  Rng rng(0);
  std::vector<LayerPtr> head;
  head.push_back(std::make_unique<Dense>(2, 1, Activation::linear, rng));
  Network net = micro_net(std::move(head));
  Parameter* table = find_param(net, "embeddings");
  table->value = Tensor({4, 2}, {0, 0, 1, 2, -1, 0.5, 3, -2});
  find_param(net, "kernel")->value = Tensor({2, 1}, {0.5, -0.25});
  find_param(net, "bias")->value = Tensor({1}, {0.1});
  const std::vector<Tensor> in = {Tensor({1, 3}, {1, 2, 0})};
  // Summed rows (0, 2.5); z = 0.5*0 - 0.25*2.5 + 0.1 = -0.525.
  const double z = -0.525;
  EXPECT_NEAR(net.forward(in, Mode::infer)[0], 1 / (1 + std::exp(-z)), 1e-15);
  EXPECT_NEAR(net.logits(in, Mode::infer)[0], z, 1e-15);
}

TEST(Network, ZeroDropoutTrainEqualsInfer) {
  Rng rng(4);
  std::vector<LayerPtr> head;
  head.push_back(std::make_unique<Dense>(2, 3, Activation::relu, rng));
  head.push_back(std::make_unique<Dropout>(0.0));
  head.push_back(std::make_unique<Dense>(3, 1, Activation::linear, rng));
  Network net = micro_net(std::move(head));
  const std::vector<Tensor> in = {indices(5, 3, 4, rng)};
  EXPECT_EQ(net.forward(in, Mode::train), net.forward(in, Mode::infer));
}

TEST(Network, LossIsStableForLargeLogits) {
  const std::vector<double> z = {800, -800};
  const std::vector<int> y = {1, 0};
  EXPECT_EQ(bce_from_logits(z, y), 0.0);
  EXPECT_NEAR(bce_from_logits(std::vector<double>{0.0}, std::vector<int>{1}), std::log(2.0), 1e-15);
  EXPECT_NEAR(bce_from_logits(z, std::vector<int>{0, 1}, true), 1600.0, 1e-9);
}

TEST(Optimizer, ZeroLearningRateChangesNothing) {
  Network net = build_architecture(1, 12, 0, ArchDims::toy(), 2);
  const ToyPairs toy = separable_toy_pairs(20, 5, 12, 3);
  std::vector<Tensor> before;
  for (Parameter* p : net.parameters()) {
    if (p->trainable) before.push_back(p->value);
  }
  TrainConfig cfg;
  cfg.learning_rate = 0;
  cfg.epochs = 2;
  cfg.batch_size = 8;
  train_network(net, toy.inputs, toy.labels, cfg);
  std::size_t k = 0;
  for (Parameter* p : net.parameters()) {
    if (p->trainable) EXPECT_EQ(p->value, before[k++]) << p->name;
  }
}

TEST(Optimizer, OneAdamStepByHand) {
  Parameter p{"w", Tensor({2}, {1.0, -2.0}), Tensor({2}, {0.5, -4.0}), true};
  TrainConfig cfg;
  cfg.learning_rate = 0.01;
  Adam adam({&p}, cfg);
  adam.step();
  // First step: m_hat = g and v_hat = g^2, so the move is lr * g / (|g| + eps).
  EXPECT_NEAR(p.value[0], 1.0 - 0.01 * 0.5 / (0.5 + 1e-8), 1e-15);
  EXPECT_NEAR(p.value[1], -2.0 + 0.01 * 4.0 / (4.0 + 1e-8), 1e-15);
  EXPECT_EQ(adam.steps(), 1);
}

TEST(Optimizer, LossNonIncreasingAtSmallRate) {
  Rng rng(8);
  std::vector<LayerPtr> head;
  head.push_back(std::make_unique<Dense>(2, 1, Activation::linear, rng));
  Network net = micro_net(std::move(head));
  const std::vector<Tensor> in = {indices(16, 3, 4, rng)};
  std::vector<int> y(16);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = in[0][i * 3] >= 2 ? 1 : 0;
  TrainConfig cfg;
  cfg.learning_rate = 1e-3;
  cfg.batch_size = 16;
  cfg.epochs = 30;
  const TrainingHistory h = train_network(net, in, y, cfg);
  for (std::size_t e = 1; e < h.epochs.size(); ++e) EXPECT_LE(h.epochs[e].loss, h.epochs[e - 1].loss + 1e-12);
}

TEST(Layers, BatchNormTrainModeStandardizes) {
  BatchNorm bn(3);
  Rng rng(2);
  Tensor x = random_tensor({64, 3}, rng, 4.0);
  for (std::size_t i = 0; i < 64; ++i) x[i * 3 + 1] += 10;
  const Tensor y = bn.forward(x, Mode::train, rng);
  for (std::size_t c = 0; c < 3; ++c) {
    double mean = 0, var = 0;
    for (std::size_t i = 0; i < 64; ++i) mean += y[i * 3 + c];
    mean /= 64;
    for (std::size_t i = 0; i < 64; ++i) var += (y[i * 3 + c] - mean) * (y[i * 3 + c] - mean);
    var /= 64;
    EXPECT_LE(std::abs(mean), 1e-6);
    EXPECT_LE(std::abs(var - 1), 1e-4);
  }
}

TEST(Layers, GlobalMaxPoolDominatesInputs) {
  GlobalMaxPool pool;
  Rng rng(3);
  const Tensor x = random_tensor({2, 5, 3}, rng);
  const Tensor y = pool.forward(x, Mode::infer, rng);
  for (std::size_t b = 0; b < 2; ++b) {
    for (std::size_t t = 0; t < 5; ++t) {
      for (std::size_t c = 0; c < 3; ++c) EXPECT_GE(y[b * 3 + c], x[(b * 5 + t) * 3 + c]);
    }
  }
}

TEST(Layers, LambdaSumOverOneStepIsIdentity) {
  LambdaSum sum;
  Rng rng(4);
  const Tensor x = random_tensor({3, 1, 4}, rng);
  const Tensor y = sum.forward(x, Mode::infer, rng);
  EXPECT_EQ(y.shape, (std::vector<std::size_t>{3, 4}));
  EXPECT_EQ(y.data, x.data);
}

TEST(Layers, DropoutIsInvertedAndOffAtInference) {
  Dropout drop(0.5);
  Rng rng(5);
  const Tensor x({1, 10000}, 1.0);
  const Tensor y = drop.forward(x, Mode::train, rng);
  double total = 0;
  for (double v : y.data) {
    EXPECT_TRUE(v == 0.0 || v == 2.0);
    total += v;
  }
  EXPECT_NEAR(total / 10000, 1.0, 0.05);
  EXPECT_EQ(drop.forward(x, Mode::infer, rng), x);
}

TEST(LayerGradients, DenseAndTimeDistributed) {
  Rng rng(1);
  Dense lin(4, 3, Activation::linear, rng);
  EXPECT_LE(layer_gradcheck(lin, random_tensor({5, 4}, rng), Mode::infer), 1e-6);
  Dense relu(4, 3, Activation::relu, rng);
  EXPECT_LE(layer_gradcheck(relu, random_tensor({5, 4}, rng), Mode::infer), 1e-6);
  Dense td(3, 2, Activation::relu, rng, true);
  EXPECT_LE(layer_gradcheck(td, random_tensor({2, 4, 3}, rng), Mode::infer), 1e-6);
}

TEST(LayerGradients, Embedding) {
  Rng rng(2);
  Embedding emb(6, 3, rng);
  EXPECT_LE(layer_gradcheck(emb, indices(3, 4, 6, rng), Mode::infer, true), 1e-6);
}

TEST(LayerGradients, LstmOverThreeSteps) {
  Rng rng(3);
  Lstm lstm(3, 4, 0.0, rng);
  EXPECT_LE(layer_gradcheck(lstm, random_tensor({2, 3, 3}, rng), Mode::infer), 1e-4);
  Lstm dropped(3, 4, 0.3, rng);
  EXPECT_LE(layer_gradcheck(dropped, random_tensor({2, 3, 3}, rng), Mode::train), 1e-4);
}

TEST(LayerGradients, ConvAndMaxPool) {
  Rng rng(4);
  Conv1D conv(3, 4, 3, rng);
  EXPECT_LE(layer_gradcheck(conv, random_tensor({2, 5, 3}, rng), Mode::infer), 1e-4);
  GlobalMaxPool pool;
  EXPECT_LE(layer_gradcheck(pool, random_tensor({2, 5, 3}, rng), Mode::infer), 1e-6);
  LambdaSum sum;
  EXPECT_LE(layer_gradcheck(sum, random_tensor({2, 5, 3}, rng), Mode::infer), 1e-6);
}

TEST(LayerGradients, BatchNormBothModes) {
  Rng rng(5);
  BatchNorm bn(3);
  for (Parameter* p : bn.parameters()) {
    if (p->trainable) for (double& v : p->value.data) v += rng.uniform(-0.5, 0.5);
  }
  EXPECT_LE(layer_gradcheck(bn, random_tensor({6, 3}, rng), Mode::train), 1e-4);
  EXPECT_LE(layer_gradcheck(bn, random_tensor({6, 3}, rng), Mode::infer), 1e-6);
}

TEST(LayerGradients, PReluDropoutSigmoid) {
  Rng rng(6);
  PRelu prelu(4);
  EXPECT_LE(layer_gradcheck(prelu, random_tensor({5, 4}, rng), Mode::infer), 1e-6);
  Dropout drop(0.4);
  EXPECT_LE(layer_gradcheck(drop, random_tensor({5, 4}, rng), Mode::train), 1e-6);
  Sigmoid sig;
  EXPECT_LE(layer_gradcheck(sig, random_tensor({5, 1}, rng), Mode::infer), 1e-6);
}

TEST(GradientCheck, MicroNet) {
  Rng rng(7);
  std::vector<LayerPtr> head;
  head.push_back(std::make_unique<Dense>(2, 1, Activation::linear, rng));
  Network net = micro_net(std::move(head));
  const std::vector<Tensor> in = {indices(6, 3, 4, rng)};
  const std::vector<int> y = {1, 0, 1, 1, 0, 0};
  const GradCheckReport r = gradient_check(net, in, y);
  EXPECT_LE(r.max_rel_error, 1e-6);
  std::size_t checked = 0;
  for (const auto& e : r.entries) checked += e.checked;
  EXPECT_GT(checked, 0u);
}

TEST(GradientCheck, EveryToyArchitecture) {
  ArchDims dims = ArchDims::toy();
  dims.seq_len = 4;
  dims.embed_dim = 3;
  dims.units = 3;
  dims.conv_filters = 3;
  dims.head_blocks = 2;
  GradCheckOptions options;
  options.jitter = 0.5;
  for (int id = 1; id <= kArchitectureCount; ++id) {
    Network net = build_architecture(id, 12, 3, dims, 11);
    const ToyPairs toy = separable_toy_pairs(8, dims.seq_len, 12, 12, false);
    const std::vector<double> before = net.forward(toy.inputs, Mode::infer);
    const GradCheckReport r = gradient_check(net, toy.inputs, toy.labels, options);
    EXPECT_LE(r.max_rel_error, 1e-4) << "arch " << id;
    for (const auto& e : r.entries) EXPECT_GT(e.checked, 0u) << "arch " << id << " " << e.parameter;
    EXPECT_EQ(net.forward(toy.inputs, Mode::infer), before) << "parameters not restored";
  }
}

TEST(Training, ToyArchitectureLearnsSeparablePairs) {
  Network net = build_architecture(1, 30, 0, ArchDims::toy(), 5);
  const ToyPairs toy = separable_toy_pairs(64, 5, 30, 6);
  TrainConfig cfg;
  // Enough steps for the batch-norm running statistics to settle.
  cfg.epochs = 150;
  cfg.batch_size = 16;
  cfg.learning_rate = 0.01;
  std::vector<int> seen;
  const TrainingHistory h = train_network(net, toy.inputs, toy.labels, cfg,
                                          [&](const EpochStats& s) { seen.push_back(s.epoch); });
  EXPECT_EQ(seen.size(), 150u);
  EXPECT_LT(h.epochs.back().loss, h.epochs.front().loss);
  const auto p = net.forward(toy.inputs, Mode::infer);
  std::size_t ok = 0;
  for (std::size_t i = 0; i < p.size(); ++i) ok += (p[i] >= 0.5) == (toy.labels[i] == 1);
  EXPECT_GE(static_cast<double>(ok) / static_cast<double>(p.size()), 0.9);
}

TEST(Training, RejectsBadConfigAndShapes) {
  Network net = build_architecture(1, 12, 0, ArchDims::toy(), 2);
  const ToyPairs toy = separable_toy_pairs(10, 5, 12, 3);
  TrainConfig cfg;
  cfg.batch_size = 0;
  EXPECT_THROW(train_network(net, toy.inputs, toy.labels, cfg), ContractError);
  const std::vector<int> short_labels(9, 0);
  EXPECT_THROW(train_network(net, toy.inputs, short_labels, TrainConfig{}), ContractError);
}

TEST(Weights, SaveLoadRoundTrip) {
  synth::TempDir dir;
  Network a = build_architecture(4, 12, 3, ArchDims::toy(), 1);
  Network b = build_architecture(4, 12, 3, ArchDims::toy(), 2);
  const ToyPairs toy = separable_toy_pairs(6, 5, 12, 3);
  save_weights(a, dir / "w", {{"note", "x"}});
  const auto manifest = load_weights(b, dir / "w");
  EXPECT_EQ(manifest.at("note"), "x");
  EXPECT_EQ(a.forward(toy.inputs, Mode::infer), b.forward(toy.inputs, Mode::infer));
  Network other = build_architecture(1, 12, 3, ArchDims::toy(), 1);
  EXPECT_THROW(load_weights(other, dir / "w"), ContractError);
}

TEST(Vocabulary, FrequencyOrderAndEncoding) {
  const std::vector<std::string> texts = {"b a b", "c b a?", "d"};
  const Vocabulary v = Vocabulary::build(texts);
  EXPECT_EQ(v.size(), 4u);
  EXPECT_EQ(v.index_space(), 5u);
  EXPECT_EQ(v.index_of("b"), 1u);
  EXPECT_EQ(v.index_of("a"), 2u);
  EXPECT_EQ(v.index_of("c"), 3u);
  EXPECT_EQ(v.index_of("zzz"), 0u);
  EXPECT_EQ(v.encode("A zzz c b", 5), (std::vector<double>{2, 3, 1, 0, 0}));
  EXPECT_EQ(v.encode("a a a", 2), (std::vector<double>{2, 2}));
  EXPECT_EQ(Vocabulary::build(texts, 2).size(), 2u);
  const Vocabulary back = Vocabulary::from_json(v.to_json());
  EXPECT_EQ(back.index_of("d"), v.index_of("d"));
  const Tensor batch = v.encode_batch(texts, 3);
  EXPECT_EQ(batch.shape, (std::vector<std::size_t>{3, 3}));
}
