#pragma once

#include <span>
#include <vector>

namespace dupliq::embed {

/// Optimal plan of a balanced transportation problem with integer masses.
struct TransportPlan {
  std::size_t sources = 0;
  std::size_t sinks = 0;
  std::vector<long long> flow;  // row-major sources x sinks
  double cost = 0.0;            // sum of flow * unit cost, row-major order
};

/// Exact minimum-cost transport by successive shortest paths. `cost` is
/// row-major supply.size() x demand.size() with non-negative entries.
/// Throws ContractError when masses are negative or totals differ.
TransportPlan solve_transport(std::span<const long long> supply, std::span<const long long> demand,
                              std::span<const double> cost);

}  // namespace dupliq::embed
