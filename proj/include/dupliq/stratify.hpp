#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace dupliq {

struct IndexSplit {
  std::vector<std::size_t> train;  // ascending
  std::vector<std::size_t> test;   // ascending
};

/// Class-stratified partition of positions [0, labels.size()). The test side
/// holds round(fraction * n) rows; per-class quotas are assigned by largest
/// remainder so class proportions track the input. Each class is shuffled
/// with a seeded generator and its first quota rows go to test.
///
/// Throws ContractError unless 0 < fraction < 1 and every label in {0,1}
/// occurs at least twice.
IndexSplit stratified_indices(std::span<const int> labels, double fraction,
                              std::uint64_t seed);

}  // namespace dupliq
