#include "dupliq/stratify.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "dupliq/common.hpp"
#include "dupliq/rng.hpp"

namespace dupliq {

IndexSplit stratified_indices(std::span<const int> labels, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw ContractError("split fraction must lie strictly between 0 and 1");
  }
  std::array<std::vector<std::size_t>, 2> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != 0 && labels[i] != 1) throw ContractError("labels must be 0 or 1");
    by_class[static_cast<std::size_t>(labels[i])].push_back(i);
  }
  for (const auto& members : by_class) {
    if (members.size() < 2) throw ContractError("stratified split needs at least 2 rows per class");
  }

  const std::size_t n = labels.size();
  const auto total_test = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));

  // Largest-remainder apportionment of the test quota across classes.
  std::array<std::size_t, 2> quota{};
  std::array<double, 2> remainder{};
  std::size_t assigned = 0;
  for (std::size_t c = 0; c < 2; ++c) {
    const double exact = fraction * static_cast<double>(by_class[c].size());
    quota[c] = static_cast<std::size_t>(std::floor(exact));
    remainder[c] = exact - static_cast<double>(quota[c]);
    assigned += quota[c];
  }
  while (assigned < total_test) {
    const std::size_t c = remainder[1] > remainder[0] ? 1 : 0;
    const std::size_t pick = quota[c] < by_class[c].size() ? c : 1 - c;
    ++quota[pick];
    remainder[pick] = -1.0;
    ++assigned;
  }

  Rng rng(seed);
  IndexSplit split;
  for (std::size_t c = 0; c < 2; ++c) {
    auto members = by_class[c];
    rng.shuffle(std::span<std::size_t>(members));
    split.test.insert(split.test.end(), members.begin(), members.begin() + quota[c]);
    split.train.insert(split.train.end(), members.begin() + quota[c], members.end());
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

}  // namespace dupliq
