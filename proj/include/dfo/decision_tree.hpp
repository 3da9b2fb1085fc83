#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "dfo/matrix.hpp"
#include "dfo/random.hpp"

namespace dfo {

enum class SplitCriterion { kGini, kEntropy };
enum class ThresholdMode { kExhaustive, kRandom };

struct TreeOptions {
  SplitCriterion criterion = SplitCriterion::kGini;
  /// Non-constant features examined per split; 0 means all of them.
  std::size_t feature_subset_size = 0;
  ThresholdMode threshold_mode = ThresholdMode::kExhaustive;
  std::size_t min_leaf = 1;
  /// 0 means unlimited.
  std::size_t max_depth = 0;
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  /// Sample-weighted impurity decrease n*I - n_l*I_l - n_r*I_r of the split.
  double gain = 0.0;
  std::size_t samples = 0;
  /// Class distribution at a leaf, sums to 1. Empty for internal nodes.
  std::vector<double> distribution;

  bool is_leaf() const noexcept { return feature < 0; }
  bool operator==(const TreeNode&) const = default;
};

/// Classification tree. Rows with x[feature] <= threshold go left.
class DecisionTree {
 public:
  DecisionTree() = default;
  DecisionTree(int num_classes, std::vector<TreeNode> nodes) : num_classes_(num_classes), nodes_(std::move(nodes)) {}

  int num_classes() const noexcept { return num_classes_; }
  const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }
  const TreeNode& root() const { return nodes_.front(); }

  const TreeNode& leaf_for(std::span<const double> x) const;
  /// argmax of the leaf distribution; ties go to the smallest class.
  int predict(std::span<const double> x) const;
  std::size_t depth() const;
  std::size_t leaf_count() const;

  bool operator==(const DecisionTree&) const = default;

 private:
  int num_classes_ = 0;
  std::vector<TreeNode> nodes_;
};

/// Grows a tree over X[rows] (rows may repeat, as in a bootstrap sample).
/// Features are visited in a random order drawn from `rng`; after
/// feature_subset_size non-constant features the best split found so far is
/// taken. Split ties go to the smaller feature index, then the smaller
/// threshold. Growth stops on a pure node, on fewer than 2*min_leaf rows, at
/// max_depth, or when no candidate split leaves min_leaf rows on both sides.
DecisionTree grow_tree(const Matrix& x, std::span<const int> y, int num_classes, std::span<const std::size_t> rows,
                       const TreeOptions& options, Rng& rng);

}  // namespace dfo
