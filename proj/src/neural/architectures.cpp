#include "dupliq/neural/architectures.hpp"

#include "dupliq/common.hpp"

namespace dupliq::neural {

ArchDims ArchDims::toy() {
  ArchDims d;
  d.seq_len = 5;
  d.embed_dim = 8;
  d.units = 8;
  d.conv_filters = 4;
  d.conv_kernel = 3;
  return d;
}

nlohmann::json ArchDims::to_json() const {
  return {{"seq_len", seq_len},       {"embed_dim", embed_dim},     {"units", units},
          {"conv_filters", conv_filters}, {"conv_kernel", conv_kernel}, {"dropout", dropout},
          {"recurrent_dropout", recurrent_dropout}, {"head_blocks", head_blocks}};
}

ArchDims ArchDims::from_json(const nlohmann::json& doc) {
  ArchDims d;
  try {
    d.seq_len = doc.value("seq_len", d.seq_len);
    d.embed_dim = doc.value("embed_dim", d.embed_dim);
    d.units = doc.value("units", d.units);
    d.conv_filters = doc.value("conv_filters", d.conv_filters);
    d.conv_kernel = doc.value("conv_kernel", d.conv_kernel);
    d.dropout = doc.value("dropout", d.dropout);
    d.recurrent_dropout = doc.value("recurrent_dropout", d.recurrent_dropout);
    d.head_blocks = doc.value("head_blocks", d.head_blocks);
  } catch (const nlohmann::json::exception& e) {
    throw ContractError(std::string("malformed architecture dims: ") + e.what());
  }
  return d;
}

int head_blocks_for(int id, const ArchDims& dims) {
  switch (id) {
    case 1:
    case 2:
      return 1;
    case 3:
      return dims.head_blocks > 0 ? dims.head_blocks : 4;
    case 4:
      return dims.head_blocks > 0 ? dims.head_blocks : 8;
    default:
      throw ContractError("architecture id must be 1..4, got " + std::to_string(id));
  }
}

namespace {

Network assemble(int id, std::size_t vocab_size, const Tensor* frozen, const ArchDims& dims, std::uint64_t seed) {
  const int blocks = head_blocks_for(id, dims);
  if (vocab_size < 1) throw ContractError("vocabulary size must be positive");
  if (dims.seq_len == 0 || dims.embed_dim == 0 || dims.units == 0) throw ContractError("architecture sizes must be positive");
  if (id >= 2 && !frozen) throw ContractError("architecture " + std::to_string(id) + " needs GloVe embeddings");

  Rng rng(seed);
  std::vector<Branch> branches;
  for (std::size_t side = 0; side < 2; ++side) {
    Branch b{side, {}};
    b.layers.push_back(std::make_unique<Embedding>(vocab_size, dims.embed_dim, rng));
    b.layers.push_back(std::make_unique<Lstm>(dims.embed_dim, dims.units, dims.recurrent_dropout, rng));
    branches.push_back(std::move(b));
  }
  if (id >= 2) {
    const std::size_t gdim = frozen->dim(1);
    for (std::size_t side = 0; side < 2; ++side) {
      Branch b{side, {}};
      b.layers.push_back(std::make_unique<Embedding>(*frozen, true));
      b.layers.push_back(std::make_unique<Dense>(gdim, dims.units, Activation::relu, rng, true));
      b.layers.push_back(std::make_unique<LambdaSum>());
      branches.push_back(std::move(b));
    }
  }
  if (id == 4) {
    const std::size_t gdim = frozen->dim(1);
    for (std::size_t side = 0; side < 2; ++side) {
      Branch b{side, {}};
      b.layers.push_back(std::make_unique<Embedding>(*frozen, true));
      b.layers.push_back(std::make_unique<Conv1D>(gdim, dims.conv_filters, dims.conv_kernel, rng));
      b.layers.push_back(std::make_unique<Dropout>(dims.dropout));
      b.layers.push_back(std::make_unique<Conv1D>(dims.conv_filters, dims.conv_filters, dims.conv_kernel, rng));
      b.layers.push_back(std::make_unique<GlobalMaxPool>());
      b.layers.push_back(std::make_unique<BatchNorm>(dims.conv_filters));
      b.layers.push_back(std::make_unique<Dense>(dims.conv_filters, dims.units, Activation::relu, rng));
      b.layers.push_back(std::make_unique<Dropout>(dims.dropout));
      branches.push_back(std::move(b));
    }
  }

  const std::size_t merge = branches.size() * dims.units;
  std::vector<LayerPtr> head;
  head.push_back(std::make_unique<BatchNorm>(merge));
  std::size_t width = merge;
  for (int block = 0; block < blocks; ++block) {
    if (id == 4) {
      head.push_back(std::make_unique<Dense>(width, dims.units, Activation::relu, rng));
      head.push_back(std::make_unique<Dropout>(dims.dropout));
    } else {
      head.push_back(std::make_unique<Dense>(width, dims.units, Activation::linear, rng));
      head.push_back(std::make_unique<PRelu>(dims.units));
      head.push_back(std::make_unique<Dropout>(dims.dropout));
    }
    head.push_back(std::make_unique<BatchNorm>(dims.units));
    width = dims.units;
  }
  head.push_back(std::make_unique<Dense>(width, 1, Activation::linear, rng));
  head.push_back(std::make_unique<Sigmoid>());
  return Network(std::move(branches), std::move(head), 2, dims.seq_len, rng.next());
}

}  // namespace

Network build_architecture(int id, const Vocabulary& vocab, const embed::EmbeddingTable* glove, const ArchDims& dims,
                           std::uint64_t seed) {
  head_blocks_for(id, dims);
  const std::size_t vocab_size = vocab.index_space();
  if (id == 1) return assemble(id, vocab_size, nullptr, dims, seed);
  if (!glove || glove->dim() == 0) throw ContractError("architecture " + std::to_string(id) + " needs GloVe embeddings");
  Tensor table({vocab_size, glove->dim()});
  for (std::size_t i = 1; i < vocab_size; ++i) {
    if (const auto vec = glove->lookup(vocab.word(i))) {
      for (std::size_t k = 0; k < glove->dim(); ++k) table[i * glove->dim() + k] = (*vec)[k];
    }
  }
  return assemble(id, vocab_size, &table, dims, seed);
}

Network build_architecture(int id, std::size_t vocab_size, std::size_t glove_dim, const ArchDims& dims,
                           std::uint64_t seed) {
  head_blocks_for(id, dims);
  if (id == 1) return assemble(id, vocab_size, nullptr, dims, seed);
  if (glove_dim == 0) throw ContractError("architecture " + std::to_string(id) + " needs a GloVe dimension");
  Rng rng(seed ^ 0x5851F42D4C957F2DULL);
  Tensor table({vocab_size, glove_dim});
  for (std::size_t i = glove_dim; i < table.size(); ++i) table[i] = rng.uniform(-0.5, 0.5);
  return assemble(id, vocab_size, &table, dims, seed);
}

}  // namespace dupliq::neural
