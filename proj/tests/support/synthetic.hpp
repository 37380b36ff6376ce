#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "dupliq/corpus.hpp"
#include "oracles.hpp"

namespace synth {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

/// Content words used by the generated questions.
const std::vector<std::string>& topic_words();

/// Question pairs in the shape of the real corpus: duplicates reorder and
/// lightly edit the same words, non-duplicates share at most a couple.
/// Roughly 37% positives. `short_rows` appends pairs with a tiny question.
dupliq::corpus::PairTable question_pairs(std::size_t n, std::uint64_t seed, std::size_t short_rows = 0);

/// Deterministic random vectors for `words`, exactly representable in the
/// text written by write_glove.
oracle::WordVectors word_vectors(const std::vector<std::string>& words, std::size_t dim, std::uint64_t seed);

void write_glove(const oracle::WordVectors& vectors, const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& content);

}  // namespace synth
