#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "dupliq/common.hpp"
#include "dupliq/learn/tree.hpp"

namespace dupliq::learn {

double Tree::predict(const Matrix& x, std::size_t row) const {
  int id = 0;
  while (nodes[static_cast<std::size_t>(id)].feature >= 0) {
    const TreeNode& node = nodes[static_cast<std::size_t>(id)];
    id = x.at(row, static_cast<std::size_t>(node.feature)) <= node.threshold ? node.left : node.right;
  }
  return nodes[static_cast<std::size_t>(id)].value;
}

std::size_t Tree::depth() const {
  if (nodes.empty()) return 0;
  std::vector<std::size_t> level(nodes.size(), 0);
  std::size_t deepest = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const TreeNode& node = nodes[i];
    if (node.feature < 0) continue;
    for (int child : {node.left, node.right}) {
      level[static_cast<std::size_t>(child)] = level[i] + 1;
      deepest = std::max(deepest, level[i] + 1);
    }
  }
  return deepest;
}

namespace {

constexpr double kMinGain = 1e-12;

struct Stats {
  double w = 0, g = 0, h = 0;
  long long n = 0;

  void add(const Stats& o) {
    w += o.w;
    g += o.g;
    h += o.h;
    n += o.n;
  }
  Stats minus(const Stats& o) const { return {w - o.w, g - o.g, h - o.h, n - o.n}; }
};

struct Open {
  int id = 0;  // index in Tree::nodes
  int depth = 0;
  Stats total;
};

struct Best {
  double gain = -std::numeric_limits<double>::infinity();
  int feature = -1;
  double threshold = 0;
};

class Scorer {
 public:
  explicit Scorer(const TreeParams& p) : p_(p) {}

  double score(const Stats& s) const {
    switch (p_.criterion) {
      case Criterion::gini:
        return s.w > 0 ? (s.g * s.g + (s.w - s.g) * (s.w - s.g)) / s.w : 0.0;
      case Criterion::squared:
        return s.w > 0 ? s.g * s.g / s.w : 0.0;
      case Criterion::newton:
        return s.g * s.g / (s.h + p_.lambda);
    }
    return 0.0;
  }

  bool admissible(const Stats& left, const Stats& right) const {
    if (left.n == 0 || right.n == 0) return false;
    if (left.w < p_.min_leaf_weight || right.w < p_.min_leaf_weight) return false;
    if (p_.criterion == Criterion::newton &&
        (left.h < p_.min_child_hessian || right.h < p_.min_child_hessian)) {
      return false;
    }
    return true;
  }

  double gain(const Stats& left, const Stats& right, const Stats& parent) const {
    const double raw = score(left) + score(right) - score(parent);
    if (p_.criterion == Criterion::newton) return 0.5 * raw - p_.gamma;
    return raw;
  }

  // Impure gini nodes accept a zero-improvement split; the other criteria
  // need a positive gain.
  bool accepts(double gain) const {
    return p_.criterion == Criterion::gini ? gain >= -kMinGain : gain > kMinGain;
  }

  bool splittable(const Open& node) const {
    if (p_.max_depth >= 0 && node.depth >= p_.max_depth) return false;
    if (node.total.n < 2) return false;
    if (p_.criterion == Criterion::gini) {
      const double tol = 1e-12 * std::max(1.0, node.total.w);
      if (node.total.g <= tol || node.total.w - node.total.g <= tol) return false;
    }
    return true;
  }

  double leaf(const Stats& s) const {
    switch (p_.criterion) {
      case Criterion::gini:
        return s.w > 0 ? s.g / s.w : 0.0;
      case Criterion::squared:
        return std::abs(s.h) > 1e-12 ? s.g / s.h : 0.0;
      case Criterion::newton:
        return -s.g / (s.h + p_.lambda);
    }
    return 0.0;
  }

 private:
  const TreeParams& p_;
};

// Scratch for scanning columns against every open node.
struct Scan {
  std::vector<Stats> nonzero, cum;
  std::vector<double> last, lo, hi, cut;
  std::vector<char> zero_done, active;
  std::vector<Best> best;

  explicit Scan(std::size_t open)
      : nonzero(open), cum(open), last(open), lo(open), hi(open), cut(open), zero_done(open),
        active(open), best(open) {}
};

struct Level {
  const ColumnStore& columns;
  const std::vector<int>& slot;  // row -> open node position, -1 when idle
  std::span<const double> w, g, h;
  const std::vector<Open>& open;
  const std::vector<std::vector<std::uint32_t>>* nodes_for_col;  // null: every node
  const Scorer& scorer;
  const TreeParams& params;
  std::uint64_t seed;

  Stats row_stats(std::uint32_t r) const { return {w[r], g[r], h[r], 1}; }

  void consider(Scan& s, std::size_t n, std::size_t col, double threshold, const Stats& left) const {
    const Stats right = open[n].total.minus(left);
    if (!scorer.admissible(left, right)) return;
    const double gain = scorer.gain(left, right, open[n].total);
    if (!scorer.accepts(gain)) return;
    if (gain > s.best[n].gain) s.best[n] = {gain, static_cast<int>(col), threshold};
  }

  void push(Scan& s, std::size_t n, std::size_t col, double value, const Stats& st) const {
    if (s.cum[n].n > 0 && value > s.last[n]) {
      double mid = s.last[n] + (value - s.last[n]) / 2;
      if (mid >= value) mid = s.last[n];
      consider(s, n, col, mid, s.cum[n]);
    }
    s.cum[n].add(st);
    s.last[n] = value;
  }

  void push_zero(Scan& s, std::size_t n, std::size_t col) const {
    s.zero_done[n] = 1;
    const Stats zeros = open[n].total.minus(s.nonzero[n]);
    if (zeros.n > 0) push(s, n, col, 0.0, zeros);
  }

  void scan_column(Scan& s, std::size_t col) const {
    std::vector<std::uint32_t> all;
    std::span<const std::uint32_t> nodes;
    if (nodes_for_col) {
      nodes = (*nodes_for_col)[col];
    } else {
      all.resize(open.size());
      std::iota(all.begin(), all.end(), 0u);
      nodes = all;
    }
    if (nodes.empty()) return;
    for (std::uint32_t n : nodes) {
      s.active[n] = 1;
      s.nonzero[n] = {};
      s.cum[n] = {};
      s.zero_done[n] = 0;
      s.lo[n] = std::numeric_limits<double>::infinity();
      s.hi[n] = -std::numeric_limits<double>::infinity();
    }
    const std::size_t begin = columns.colptr[col];
    const std::size_t end = columns.colptr[col + 1];

    for (std::size_t k = begin; k < end; ++k) {
      const std::uint32_t r = columns.row_ids[k];
      const int n = slot[r];
      if (n < 0 || !s.active[static_cast<std::size_t>(n)]) continue;
      s.nonzero[static_cast<std::size_t>(n)].add(row_stats(r));
      s.lo[static_cast<std::size_t>(n)] = std::min(s.lo[static_cast<std::size_t>(n)], columns.values[k]);
      s.hi[static_cast<std::size_t>(n)] = std::max(s.hi[static_cast<std::size_t>(n)], columns.values[k]);
    }

    if (params.random_thresholds) {
      Rng rng(seed ^ (0xD1B54A32D192ED03ULL * (col + 1)));
      for (std::uint32_t n : nodes) {
        if (s.nonzero[n].n < open[n].total.n) {
          s.lo[n] = std::min(s.lo[n], 0.0);
          s.hi[n] = std::max(s.hi[n], 0.0);
        }
        if (s.lo[n] < s.hi[n]) {
          s.cut[n] = rng.uniform(s.lo[n], s.hi[n]);
        } else {
          s.active[n] = 0;
        }
      }
      for (std::size_t k = begin; k < end; ++k) {
        const std::uint32_t r = columns.row_ids[k];
        const int n = slot[r];
        if (n < 0 || !s.active[static_cast<std::size_t>(n)]) continue;
        if (columns.values[k] <= s.cut[static_cast<std::size_t>(n)]) {
          s.cum[static_cast<std::size_t>(n)].add(row_stats(r));
        }
      }
      for (std::uint32_t n : nodes) {
        if (!s.active[n]) continue;
        s.active[n] = 0;
        Stats left = s.cum[n];
        if (s.cut[n] >= 0.0) left.add(open[n].total.minus(s.nonzero[n]));
        consider(s, n, col, s.cut[n], left);
      }
      return;
    }

    for (std::size_t k = begin; k < end; ++k) {
      const std::uint32_t r = columns.row_ids[k];
      const int n = slot[r];
      if (n < 0 || !s.active[static_cast<std::size_t>(n)]) continue;
      const auto node = static_cast<std::size_t>(n);
      const double v = columns.values[k];
      if (v > 0.0 && !s.zero_done[node]) push_zero(s, node, col);
      push(s, node, col, v, row_stats(r));
    }
    for (std::uint32_t n : nodes) {
      if (!s.zero_done[n]) push_zero(s, n, col);
      s.active[n] = 0;
    }
  }
};

}  // namespace

Tree grow_tree(const ColumnStore& columns, const Matrix& x, std::span<const double> weight,
               std::span<const double> g, std::span<const double> h, const TreeParams& params,
               Rng& rng, std::vector<double>* importance) {
  const std::size_t rows = columns.rows;
  if (weight.size() != rows || g.size() != rows || h.size() != rows || x.rows() != rows) {
    throw ContractError("tree inputs disagree on the number of rows");
  }
  if (importance && importance->size() != columns.cols) importance->assign(columns.cols, 0.0);

  const Scorer scorer(params);
  Tree tree;
  std::vector<int> slot(rows, -1);
  Stats root;
  for (std::size_t r = 0; r < rows; ++r) {
    if (weight[r] <= 0.0) continue;
    slot[r] = 0;
    root.add({weight[r], g[r], h[r], 1});
  }
  tree.nodes.push_back({});
  tree.nodes[0].weight = root.w;
  tree.nodes[0].value = scorer.leaf(root);
  std::vector<Open> open = {{0, 0, root}};

  const std::size_t width = columns.cols;
  const bool sampled = params.max_features > 0 && params.max_features < width;
  std::vector<std::uint32_t> pool(width);

  while (!open.empty()) {
    // Nodes that cannot split become leaves now; the rest are scanned.
    std::vector<Open> live;
    std::vector<int> remap(open.size(), -1);
    for (std::size_t i = 0; i < open.size(); ++i) {
      if (scorer.splittable(open[i])) {
        remap[i] = static_cast<int>(live.size());
        live.push_back(open[i]);
      }
    }
    if (live.empty()) break;
    for (auto& s : slot) {
      if (s >= 0) s = remap[static_cast<std::size_t>(s)];
    }

    std::vector<std::vector<std::uint32_t>> nodes_for_col;
    if (sampled) {
      nodes_for_col.resize(width);
      for (std::size_t n = 0; n < live.size(); ++n) {
        std::iota(pool.begin(), pool.end(), 0u);
        // Partial Fisher-Yates: the first max_features slots are the sample.
        for (std::size_t i = 0; i < params.max_features; ++i) {
          std::swap(pool[i], pool[i + rng.below(width - i)]);
        }
        for (std::size_t i = 0; i < params.max_features; ++i) {
          nodes_for_col[pool[i]].push_back(static_cast<std::uint32_t>(n));
        }
      }
    }

    const Level level{columns, slot,   weight, g, h, live, sampled ? &nodes_for_col : nullptr,
                      scorer,  params, rng.next()};

    const std::size_t workers = std::max<std::size_t>(1, std::min(thread_count(), width));
    const std::size_t chunk = (width + workers - 1) / workers;
    std::vector<std::vector<Best>> partial(workers);
    parallel_for(
        workers,
        [&](std::size_t wb, std::size_t we) {
          for (std::size_t wk = wb; wk < we; ++wk) {
            Scan scan(live.size());
            const std::size_t cb = wk * chunk;
            const std::size_t ce = std::min(width, cb + chunk);
            for (std::size_t c = cb; c < ce; ++c) level.scan_column(scan, c);
            partial[wk] = std::move(scan.best);
          }
        },
        1);

    // Chunks cover ascending column ranges, so a strict comparison keeps the
    // lowest column on ties.
    std::vector<Best> best(live.size());
    for (const auto& part : partial) {
      for (std::size_t n = 0; n < part.size(); ++n) {
        if (part[n].feature >= 0 && part[n].gain > best[n].gain) best[n] = part[n];
      }
    }

    std::vector<Open> next;
    std::vector<int> left_slot(live.size(), -1);
    for (std::size_t n = 0; n < live.size(); ++n) {
      if (best[n].feature < 0) continue;
      const int id = live[n].id;
      const int left = static_cast<int>(tree.nodes.size());
      tree.nodes.push_back({});
      tree.nodes.push_back({});
      TreeNode& node = tree.nodes[static_cast<std::size_t>(id)];
      node.feature = best[n].feature;
      node.threshold = best[n].threshold;
      node.left = left;
      node.right = left + 1;
      node.gain = std::max(0.0, best[n].gain);
      if (importance) (*importance)[static_cast<std::size_t>(node.feature)] += node.gain;
      left_slot[n] = static_cast<int>(next.size());
      next.push_back({left, live[n].depth + 1, {}});
      next.push_back({left + 1, live[n].depth + 1, {}});
    }

    for (std::size_t r = 0; r < rows; ++r) {
      const int s = slot[r];
      if (s < 0) continue;
      const int base = left_slot[static_cast<std::size_t>(s)];
      if (base < 0) {
        slot[r] = -1;
        continue;
      }
      const TreeNode& node = tree.nodes[static_cast<std::size_t>(live[static_cast<std::size_t>(s)].id)];
      const bool go_left = x.at(r, static_cast<std::size_t>(node.feature)) <= node.threshold;
      const int target = base + (go_left ? 0 : 1);
      slot[r] = target;
      next[static_cast<std::size_t>(target)].total.add({weight[r], g[r], h[r], 1});
    }
    for (const Open& child : next) {
      TreeNode& node = tree.nodes[static_cast<std::size_t>(child.id)];
      node.weight = child.total.w;
      node.value = scorer.leaf(child.total);
    }
    open = std::move(next);
  }
  return tree;
}

}  // namespace dupliq::learn
