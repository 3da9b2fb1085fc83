#include "dfo/decision_tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace dfo {

namespace {

// Sample-weighted impurity n * I(counts).
double weighted_impurity(std::span<const double> counts, double n, SplitCriterion criterion) {
  if (n <= 0.0) return 0.0;
  if (criterion == SplitCriterion::kGini) {
    double sq = 0.0;
    for (double c : counts) sq += c * c;
    return n - sq / n;
  }
  double acc = n * std::log(n);
  for (double c : counts) {
    if (c > 0.0) acc -= c * std::log(c);
  }
  return acc;
}

double midpoint(double lo, double hi) {
  const double mid = lo + (hi - lo) / 2.0;
  return (mid >= hi || mid < lo) ? lo : mid;
}

struct Candidate {
  int feature = -1;
  double threshold = 0.0;
  double gain = -1.0;

  bool beats(const Candidate& other) const {
    if (other.feature < 0) return true;
    if (gain != other.gain) return gain > other.gain;
    if (feature != other.feature) return feature < other.feature;
    return threshold < other.threshold;
  }
};

class TreeBuilder {
 public:
  TreeBuilder(const Matrix& x, std::span<const int> y, int num_classes, const TreeOptions& options, Rng& rng)
      : x_(x), y_(y), k_(static_cast<std::size_t>(num_classes)), options_(options), rng_(rng),
        features_(x.cols()) {
    std::iota(features_.begin(), features_.end(), 0);
  }

  int build(std::vector<std::size_t> rows, std::size_t depth) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    std::vector<double> counts(k_, 0.0);
    for (auto r : rows) counts[static_cast<std::size_t>(y_[r])] += 1.0;
    const double n = static_cast<double>(rows.size());
    nodes_[id].samples = rows.size();

    const bool pure = std::count_if(counts.begin(), counts.end(), [](double c) { return c > 0.0; }) <= 1;
    const bool too_small = rows.size() < 2 * std::max<std::size_t>(options_.min_leaf, 1);
    const bool too_deep = options_.max_depth > 0 && depth >= options_.max_depth;
    Candidate best;
    if (!pure && !too_small && !too_deep) best = find_split(rows, counts, n);

    if (best.feature < 0) {
      auto& node = nodes_[id];
      node.distribution.resize(k_);
      for (std::size_t c = 0; c < k_; ++c) node.distribution[c] = n > 0.0 ? counts[c] / n : 1.0 / static_cast<double>(k_);
      return id;
    }

    std::vector<std::size_t> left, right;
    for (auto r : rows) (x_(r, static_cast<std::size_t>(best.feature)) <= best.threshold ? left : right).push_back(r);
    rows.clear();
    rows.shrink_to_fit();
    nodes_[id].feature = best.feature;
    nodes_[id].threshold = best.threshold;
    nodes_[id].gain = std::max(0.0, best.gain);
    const int l = build(std::move(left), depth + 1);
    const int r = build(std::move(right), depth + 1);
    nodes_[id].left = l;
    nodes_[id].right = r;
    return id;
  }

  std::vector<TreeNode> take() { return std::move(nodes_); }

 private:
  Candidate find_split(const std::vector<std::size_t>& rows, const std::vector<double>& counts, double n) {
    const double parent = weighted_impurity(counts, n, options_.criterion);
    const std::size_t d = features_.size();
    const std::size_t quota = options_.feature_subset_size == 0 ? d : options_.feature_subset_size;
    std::size_t visited = 0;
    Candidate best;
    for (std::size_t t = 0; t < d && visited < quota; ++t) {
      const std::size_t pick = t + static_cast<std::size_t>(rng_.below(d - t));
      std::swap(features_[t], features_[pick]);
      const std::size_t f = features_[t];
      Candidate c;
      const bool non_constant = options_.threshold_mode == ThresholdMode::kExhaustive
                                    ? scan_exhaustive(rows, f, parent, c)
                                    : scan_random(rows, f, parent, c);
      if (!non_constant) continue;
      ++visited;
      if (c.feature >= 0 && c.beats(best)) best = c;
    }
    return best;
  }

  // Returns false when the feature is constant on these rows.
  bool scan_exhaustive(const std::vector<std::size_t>& rows, std::size_t f, double parent, Candidate& out) {
    pairs_.clear();
    for (auto r : rows) pairs_.emplace_back(x_(r, f), y_[r]);
    std::sort(pairs_.begin(), pairs_.end());
    if (pairs_.front().first == pairs_.back().first) return false;

    const std::size_t n = pairs_.size();
    const std::size_t min_leaf = std::max<std::size_t>(options_.min_leaf, 1);
    left_.assign(k_, 0.0);
    right_.assign(k_, 0.0);
    for (const auto& p : pairs_) right_[static_cast<std::size_t>(p.second)] += 1.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const auto c = static_cast<std::size_t>(pairs_[i].second);
      left_[c] += 1.0;
      right_[c] -= 1.0;
      if (pairs_[i].first == pairs_[i + 1].first) continue;
      const std::size_t n_left = i + 1;
      if (n_left < min_leaf || n - n_left < min_leaf) continue;
      const double gain = parent - weighted_impurity(left_, static_cast<double>(n_left), options_.criterion) -
                          weighted_impurity(right_, static_cast<double>(n - n_left), options_.criterion);
      if (out.feature < 0 || gain > out.gain) {
        out.feature = static_cast<int>(f);
        out.gain = gain;
        out.threshold = midpoint(pairs_[i].first, pairs_[i + 1].first);
      }
    }
    return true;
  }

  bool scan_random(const std::vector<std::size_t>& rows, std::size_t f, double parent, Candidate& out) {
    double lo = x_(rows.front(), f), hi = lo;
    for (auto r : rows) {
      lo = std::min(lo, x_(r, f));
      hi = std::max(hi, x_(r, f));
    }
    if (lo == hi) return false;
    double threshold = rng_.uniform(lo, hi);
    if (threshold >= hi) threshold = lo;

    left_.assign(k_, 0.0);
    right_.assign(k_, 0.0);
    std::size_t n_left = 0;
    for (auto r : rows) {
      if (x_(r, f) <= threshold) {
        left_[static_cast<std::size_t>(y_[r])] += 1.0;
        ++n_left;
      } else {
        right_[static_cast<std::size_t>(y_[r])] += 1.0;
      }
    }
    const std::size_t n = rows.size();
    const std::size_t min_leaf = std::max<std::size_t>(options_.min_leaf, 1);
    if (n_left < min_leaf || n - n_left < min_leaf) return true;
    out.feature = static_cast<int>(f);
    out.threshold = threshold;
    out.gain = parent - weighted_impurity(left_, static_cast<double>(n_left), options_.criterion) -
               weighted_impurity(right_, static_cast<double>(n - n_left), options_.criterion);
    return true;
  }

  const Matrix& x_;
  std::span<const int> y_;
  std::size_t k_;
  TreeOptions options_;
  Rng& rng_;
  std::vector<std::size_t> features_;
  std::vector<TreeNode> nodes_;
  std::vector<std::pair<double, int>> pairs_;
  std::vector<double> left_, right_;
};

}  // namespace

const TreeNode& DecisionTree::leaf_for(std::span<const double> x) const {
  const TreeNode* node = &nodes_.front();
  while (!node->is_leaf()) {
    node = &nodes_[static_cast<std::size_t>(x[static_cast<std::size_t>(node->feature)] <= node->threshold ? node->left
                                                                                                          : node->right)];
  }
  return *node;
}

int DecisionTree::predict(std::span<const double> x) const {
  const auto& dist = leaf_for(x).distribution;
  return static_cast<int>(std::max_element(dist.begin(), dist.end()) - dist.begin());
}

std::size_t DecisionTree::depth() const {
  std::size_t best = 0;
  std::vector<std::pair<int, std::size_t>> stack{{0, 0}};
  while (!stack.empty()) {
    const auto [id, depth] = stack.back();
    stack.pop_back();
    best = std::max(best, depth);
    const auto& node = nodes_[static_cast<std::size_t>(id)];
    if (!node.is_leaf()) {
      stack.emplace_back(node.left, depth + 1);
      stack.emplace_back(node.right, depth + 1);
    }
  }
  return best;
}

std::size_t DecisionTree::leaf_count() const {
  return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(), [](const TreeNode& n) { return n.is_leaf(); }));
}

DecisionTree grow_tree(const Matrix& x, std::span<const int> y, int num_classes, std::span<const std::size_t> rows,
                       const TreeOptions& options, Rng& rng) {
  TreeBuilder builder(x, y, num_classes, options, rng);
  builder.build(std::vector<std::size_t>(rows.begin(), rows.end()), 0);
  return DecisionTree(num_classes, builder.take());
}

}  // namespace dfo
