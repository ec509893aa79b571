#pragma once

// Binary decision trees grown by exact greedy split search. The same grower
// serves the Newton booster (gradient/hessian statistics) and the weighted
// classification trees used as weak learners (weight/positive-weight statistics).

#include <span>
#include <vector>

#include "fbe/types.hpp"

namespace fbe {

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;  // rows with x[feature] < threshold go left
  int left = -1;
  int right = -1;
  double value = 0.0;  // leaf output

  bool is_leaf() const { return feature < 0; }
};

class RegressionTree {
 public:
  RegressionTree() = default;
  explicit RegressionTree(std::vector<TreeNode> nodes);

  static RegressionTree leaf(double value) { return RegressionTree({TreeNode{.value = value}}); }

  template <typename Derived>
  double predict_row(const Eigen::DenseBase<Derived>& row) const {
    int n = 0;
    while (!nodes_[static_cast<std::size_t>(n)].is_leaf()) {
      const auto& node = nodes_[static_cast<std::size_t>(n)];
      n = row(node.feature) < node.threshold ? node.left : node.right;
    }
    return nodes_[static_cast<std::size_t>(n)].value;
  }

  Vector predict(const Matrix& x) const;

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  int depth() const;
  int max_feature_index() const;

  friend bool operator==(const RegressionTree&, const RegressionTree&);

 private:
  std::vector<TreeNode> nodes_;
};

bool operator==(const TreeNode& a, const TreeNode& b);

/// Each feature column as (value, row) pairs in ascending value order, computed once per dataset.
class SortedColumns {
 public:
  struct Entry {
    double value;
    Eigen::Index row;
  };

  explicit SortedColumns(const Matrix& x);
  std::span<const Entry> column(Eigen::Index j) const { return order_[static_cast<std::size_t>(j)]; }
  Eigen::Index n_columns() const { return static_cast<Eigen::Index>(order_.size()); }

 private:
  std::vector<std::vector<Entry>> order_;
};

/// Second-order criterion: gain from G^2 / (H + l2), leaf value -G / (H + l2).
struct NewtonSplit {
  struct Stats {
    double grad = 0.0;
    double hess = 0.0;
    Stats& operator+=(const Stats& o) {
      grad += o.grad;
      hess += o.hess;
      return *this;
    }
    friend Stats operator-(Stats a, const Stats& b) { return {a.grad - b.grad, a.hess - b.hess}; }
  };

  double leaf_l2 = 1.0;
  double min_child_hessian = 1.0;

  bool admissible(const Stats& s) const { return s.hess >= min_child_hessian; }
  double score(const Stats& s) const { return s.grad * s.grad / (s.hess + leaf_l2); }
  double leaf_value(const Stats& s) const { return -s.grad / (s.hess + leaf_l2); }
};

/// Weighted Gini criterion; the leaf value is the weighted positive fraction.
struct GiniSplit {
  struct Stats {
    double weight = 0.0;
    double positive = 0.0;
    Stats& operator+=(const Stats& o) {
      weight += o.weight;
      positive += o.positive;
      return *this;
    }
    friend Stats operator-(Stats a, const Stats& b) { return {a.weight - b.weight, a.positive - b.positive}; }
  };

  bool admissible(const Stats& s) const { return s.weight > 0.0; }
  // negative weighted impurity: -W * 2 p (1 - p)
  double score(const Stats& s) const {
    return s.weight > 0.0 ? -2.0 * s.positive * (s.weight - s.positive) / s.weight : 0.0;
  }
  double leaf_value(const Stats& s) const { return s.weight > 0.0 ? s.positive / s.weight : 0.5; }
};

struct GrowOptions {
  int max_depth = 4;
  double min_split_gain = 1e-12;
};

/// Level-wise exact greedy growth. Ties keep the first candidate in
/// (feature, threshold) order so results are deterministic.
template <typename Criterion>
RegressionTree grow_tree(const Matrix& x, const SortedColumns& sorted, std::span<const typename Criterion::Stats> stats,
                         const Criterion& criterion, const GrowOptions& options);

}  // namespace fbe
