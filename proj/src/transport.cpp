#include "dupliq/transport.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "dupliq/common.hpp"

namespace dupliq::embed {
namespace {

struct Edge {
  std::size_t to;
  long long capacity;
  double cost;
  std::size_t reverse;
};

class FlowGraph {
 public:
  explicit FlowGraph(std::size_t nodes) : adjacency_(nodes) {}

  std::size_t add_edge(std::size_t from, std::size_t to, long long capacity, double cost) {
    adjacency_[from].push_back({to, capacity, cost, adjacency_[to].size()});
    adjacency_[to].push_back({from, 0, -cost, adjacency_[from].size() - 1});
    return adjacency_[from].size() - 1;
  }

  const Edge& edge(std::size_t from, std::size_t index) const { return adjacency_[from][index]; }

  // Pushes all possible flow from `source` to `sink` along cheapest paths.
  void min_cost_flow(std::size_t source, std::size_t sink) {
    const std::size_t n = adjacency_.size();
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> potential(n, 0.0);
    std::vector<double> dist(n);
    std::vector<std::size_t> prev_node(n), prev_edge(n);
    std::vector<bool> done(n);
    while (true) {
      std::fill(dist.begin(), dist.end(), inf);
      std::fill(done.begin(), done.end(), false);
      dist[source] = 0.0;
      // Dense Dijkstra; graphs here have at most a few hundred nodes.
      while (true) {
        std::size_t u = n;
        for (std::size_t v = 0; v < n; ++v) {
          if (!done[v] && dist[v] < inf && (u == n || dist[v] < dist[u])) u = v;
        }
        if (u == n) break;
        done[u] = true;
        for (std::size_t k = 0; k < adjacency_[u].size(); ++k) {
          const Edge& e = adjacency_[u][k];
          if (e.capacity <= 0 || done[e.to]) continue;
          const double reduced = std::max(0.0, e.cost + potential[u] - potential[e.to]);
          if (dist[u] + reduced < dist[e.to]) {
            dist[e.to] = dist[u] + reduced;
            prev_node[e.to] = u;
            prev_edge[e.to] = k;
          }
        }
      }
      if (dist[sink] == inf) return;
      for (std::size_t v = 0; v < n; ++v) {
        if (dist[v] < inf) potential[v] += dist[v];
      }
      long long push = std::numeric_limits<long long>::max();
      for (std::size_t v = sink; v != source; v = prev_node[v]) {
        push = std::min(push, adjacency_[prev_node[v]][prev_edge[v]].capacity);
      }
      for (std::size_t v = sink; v != source; v = prev_node[v]) {
        Edge& e = adjacency_[prev_node[v]][prev_edge[v]];
        e.capacity -= push;
        adjacency_[v][e.reverse].capacity += push;
      }
    }
  }

 private:
  std::vector<std::vector<Edge>> adjacency_;
};

}  // namespace

TransportPlan solve_transport(std::span<const long long> supply, std::span<const long long> demand,
                              std::span<const double> cost) {
  const std::size_t n = supply.size();
  const std::size_t m = demand.size();
  if (cost.size() != n * m) throw ContractError("transport cost matrix has wrong size");
  if (std::any_of(supply.begin(), supply.end(), [](long long x) { return x < 0; }) ||
      std::any_of(demand.begin(), demand.end(), [](long long x) { return x < 0; })) {
    throw ContractError("transport masses must be non-negative");
  }
  const long long total = std::accumulate(supply.begin(), supply.end(), 0LL);
  if (total != std::accumulate(demand.begin(), demand.end(), 0LL)) {
    throw ContractError("transport problem is unbalanced");
  }

  const std::size_t source = n + m;
  const std::size_t sink = n + m + 1;
  FlowGraph graph(n + m + 2);
  for (std::size_t i = 0; i < n; ++i) graph.add_edge(source, i, supply[i], 0.0);
  for (std::size_t j = 0; j < m; ++j) graph.add_edge(n + j, sink, demand[j], 0.0);
  std::vector<std::size_t> arc(n * m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) arc[i * m + j] = graph.add_edge(i, n + j, total, cost[i * m + j]);
  }
  graph.min_cost_flow(source, sink);

  TransportPlan plan;
  plan.sources = n;
  plan.sinks = m;
  plan.flow.resize(n * m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const long long f = total - graph.edge(i, arc[i * m + j]).capacity;
      plan.flow[i * m + j] = f;
      plan.cost += static_cast<double>(f) * cost[i * m + j];
    }
  }
  return plan;
}

}  // namespace dupliq::embed
