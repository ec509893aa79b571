#include "fbe/tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace fbe {

bool operator==(const TreeNode& a, const TreeNode& b) {
  return a.feature == b.feature && a.threshold == b.threshold && a.left == b.left && a.right == b.right &&
         a.value == b.value;
}

bool operator==(const RegressionTree& a, const RegressionTree& b) { return a.nodes_ == b.nodes_; }

RegressionTree::RegressionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.empty()) throw ValidationError("tree: no nodes");
  const auto n = static_cast<int>(nodes_.size());
  for (const auto& node : nodes_) {
    if (node.is_leaf()) {
      if (!std::isfinite(node.value)) throw ValidationError("tree: non-finite leaf value");
    } else if (node.left <= 0 || node.left >= n || node.right <= 0 || node.right >= n) {
      throw ValidationError("tree: child index out of range");
    }
  }
}

Vector RegressionTree::predict(const Matrix& x) const {
  Vector out(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) out(i) = predict_row(x.row(i));
  return out;
}

int RegressionTree::depth() const {
  std::vector<int> level(nodes_.size(), 0);
  int deepest = 0;
  // children are always appended after their parent
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const auto& node = nodes_[i];
    deepest = std::max(deepest, level[i]);
    if (!node.is_leaf()) {
      level[static_cast<std::size_t>(node.left)] = level[i] + 1;
      level[static_cast<std::size_t>(node.right)] = level[i] + 1;
    }
  }
  return deepest;
}

int RegressionTree::max_feature_index() const {
  int m = -1;
  for (const auto& node : nodes_) m = std::max(m, node.feature);
  return m;
}

SortedColumns::SortedColumns(const Matrix& x) : order_(static_cast<std::size_t>(x.cols())) {
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    auto& entries = order_[static_cast<std::size_t>(j)];
    entries.resize(static_cast<std::size_t>(x.rows()));
    for (Eigen::Index i = 0; i < x.rows(); ++i) entries[static_cast<std::size_t>(i)] = {x(i, j), i};
    std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) { return a.value < b.value; });
  }
}

namespace {

// Split point strictly above `lo` and not above `hi`.
double split_point(double lo, double hi) {
  const double mid = lo + (hi - lo) / 2.0;
  return mid > lo ? mid : hi;
}

}  // namespace

template <typename Criterion>
RegressionTree grow_tree(const Matrix& x, const SortedColumns& sorted, std::span<const typename Criterion::Stats> stats,
                         const Criterion& criterion, const GrowOptions& options) {
  using Stats = typename Criterion::Stats;
  const auto n = x.rows();
  if (static_cast<Eigen::Index>(stats.size()) != n) throw ValidationError("grow_tree: stats length differs from rows");
  if (sorted.n_columns() != x.cols()) throw ValidationError("grow_tree: sorted index built for another matrix");
  if (options.max_depth < 0) throw ValidationError("grow_tree: max_depth must be non-negative");

  std::vector<TreeNode> nodes(1);
  std::vector<Stats> totals(1);
  std::vector<int> node_of(static_cast<std::size_t>(n), 0);
  for (const auto& s : stats) totals[0] += s;

  struct Candidate {
    double gain = -std::numeric_limits<double>::infinity();
    int feature = -1;
    double threshold = 0.0;
  };
  struct Scan {
    Stats left;
    double last = 0.0;
    bool started = false;
  };

  std::vector<int> open{0};
  for (int depth = 0; depth < options.max_depth && !open.empty(); ++depth) {
    std::vector<char> is_open(nodes.size(), 0);
    for (const int id : open) is_open[static_cast<std::size_t>(id)] = 1;
    std::vector<Candidate> best(nodes.size());
    std::vector<Scan> scan(nodes.size());
    std::vector<double> parent_score(nodes.size(), 0.0);
    for (const int id : open) parent_score[static_cast<std::size_t>(id)] = criterion.score(totals[static_cast<std::size_t>(id)]);

    for (Eigen::Index f = 0; f < x.cols(); ++f) {
      for (const int id : open) scan[static_cast<std::size_t>(id)] = Scan{};
      for (const auto& [value, row] : sorted.column(f)) {
        const auto id = static_cast<std::size_t>(node_of[static_cast<std::size_t>(row)]);
        if (!is_open[id]) continue;
        auto& st = scan[id];
        if (st.started && value != st.last) {
          const Stats right = totals[id] - st.left;
          if (criterion.admissible(st.left) && criterion.admissible(right)) {
            const double gain = criterion.score(st.left) + criterion.score(right) - parent_score[id];
            if (gain > best[id].gain) best[id] = Candidate{gain, static_cast<int>(f), split_point(st.last, value)};
          }
        }
        st.left += stats[static_cast<std::size_t>(row)];
        st.last = value;
        st.started = true;
      }
    }

    std::vector<int> next_open;
    std::vector<int> split_nodes;
    for (const int id : open) {
      const auto& cand = best[static_cast<std::size_t>(id)];
      if (cand.feature < 0 || !(cand.gain > options.min_split_gain)) continue;
      const int left = static_cast<int>(nodes.size());
      auto& node = nodes[static_cast<std::size_t>(id)];
      node.feature = cand.feature;
      node.threshold = cand.threshold;
      node.left = left;
      node.right = left + 1;
      nodes.resize(nodes.size() + 2);  // invalidates `node`
      totals.resize(totals.size() + 2);
      split_nodes.push_back(id);
      next_open.push_back(left);
      next_open.push_back(left + 1);
    }
    if (split_nodes.empty()) break;

    for (Eigen::Index row = 0; row < n; ++row) {
      auto& id = node_of[static_cast<std::size_t>(row)];
      const auto& node = nodes[static_cast<std::size_t>(id)];
      if (node.is_leaf() || !is_open[static_cast<std::size_t>(id)]) continue;
      id = x(row, node.feature) < node.threshold ? node.left : node.right;
      totals[static_cast<std::size_t>(id)] += stats[static_cast<std::size_t>(row)];
    }
    open = std::move(next_open);
  }

  for (std::size_t id = 0; id < nodes.size(); ++id) {
    if (nodes[id].is_leaf()) nodes[id].value = criterion.leaf_value(totals[id]);
  }
  return RegressionTree(std::move(nodes));
}

template RegressionTree grow_tree<NewtonSplit>(const Matrix&, const SortedColumns&, std::span<const NewtonSplit::Stats>,
                                               const NewtonSplit&, const GrowOptions&);
template RegressionTree grow_tree<GiniSplit>(const Matrix&, const SortedColumns&, std::span<const GiniSplit::Stats>,
                                             const GiniSplit&, const GrowOptions&);

}  // namespace fbe
