#pragma once

#include <cstdint>
#include <nlohmann/json.hpp>

#include "dupliq/embed.hpp"
#include "dupliq/neural/network.hpp"
#include "dupliq/neural/vocabulary.hpp"

namespace dupliq::neural {

/// Sizes used by build_architecture. The defaults are full size; toy()
/// shrinks everything for tests.
struct ArchDims {
  std::size_t seq_len = kDefaultSequenceLength;
  std::size_t embed_dim = 300;
  std::size_t units = 300;
  std::size_t conv_filters = 64;
  std::size_t conv_kernel = 3;
  double dropout = 0.2;
  double recurrent_dropout = 0.2;
  int head_blocks = 0;  // 0: 4 for arch 3, 8 for arch 4

  static ArchDims toy();
  nlohmann::json to_json() const;
  static ArchDims from_json(const nlohmann::json& doc);
};

inline constexpr int kArchitectureCount = 4;

/// Architectures 1-4. Ids 2-4 need `glove` for their frozen branches; rows
/// for words it lacks are zero.
Network build_architecture(int id, const Vocabulary& vocab, const embed::EmbeddingTable* glove,
                           const ArchDims& dims = {}, std::uint64_t seed = 0);

/// Same topology with the vocabulary and embedding sizes given directly; the
/// frozen rows are drawn at random instead of read from a table.
Network build_architecture(int id, std::size_t vocab_size, std::size_t glove_dim, const ArchDims& dims,
                           std::uint64_t seed);

int head_blocks_for(int id, const ArchDims& dims);

}  // namespace dupliq::neural
