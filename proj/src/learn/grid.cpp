#include "dupliq/learn/grid.hpp"

#include "dupliq/common.hpp"
#include "dupliq/learn/metrics.hpp"
#include "dupliq/stratify.hpp"

namespace dupliq::learn {

GridResult grid_search(std::span<const ClassifierSpec> grid, const Matrix& x, std::span<const int> y,
                       double val_fraction, std::uint64_t seed) {
  if (grid.empty()) throw ContractError("grid search needs at least one spec");
  const IndexSplit split = stratified_indices(y, val_fraction, seed);
  const Matrix train_x = x.select_rows(split.train);
  const Matrix val_x = x.select_rows(split.test);
  std::vector<int> train_y, val_y;
  for (std::size_t i : split.train) train_y.push_back(y[i]);
  for (std::size_t i : split.test) val_y.push_back(y[i]);

  GridResult result;
  double best = -1;
  for (const ClassifierSpec& spec : grid) {
    const auto model = train(spec, train_x, train_y);
    const double accuracy = evaluate(*model, val_x, val_y).accuracy;
    result.table.push_back({spec, accuracy});
    if (accuracy > best) {
      best = accuracy;
      result.best = spec;
    }
  }
  return result;
}

}  // namespace dupliq::learn
