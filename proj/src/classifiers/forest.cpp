#include <cmath>
#include <numeric>

#include "dfo/classifiers.hpp"
#include "dfo/random.hpp"

namespace dfo::detail {

ForestModel fit_forest(const Matrix& x, std::span<const int> y, int k, const HyperParams& params, bool extra_trees,
                       std::uint64_t seed) {
  const int n_trees = params.integer("trees", 100);
  const std::size_t d = x.cols(), n = x.rows();
  const int max_features = params.integer("max_features", 0);
  TreeOptions options;
  options.feature_subset_size = max_features > 0 ? static_cast<std::size_t>(max_features)
                                                 : static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(d))));
  options.threshold_mode = extra_trees ? ThresholdMode::kRandom : ThresholdMode::kExhaustive;
  options.min_leaf = static_cast<std::size_t>(params.integer("min_leaf", 1));
  options.max_depth = static_cast<std::size_t>(params.integer("max_depth", 0));

  ForestModel m;
  m.bootstrap = !extra_trees;
  m.trees.reserve(static_cast<std::size_t>(n_trees));
  std::vector<std::size_t> rows(n);
  for (int t = 0; t < n_trees; ++t) {
    // One independent stream per tree index keeps trees order-independent.
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
    if (m.bootstrap) {
      for (auto& r : rows) r = static_cast<std::size_t>(rng.below(n));
    } else {
      std::iota(rows.begin(), rows.end(), 0);
    }
    m.trees.push_back(grow_tree(x, y, k, rows, options, rng));
  }
  return m;
}

std::vector<int> predict_forest(const ForestModel& m, int k, const Matrix& x) {
  std::vector<int> out(x.rows());
  std::vector<int> votes(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < x.rows(); ++i) {
    std::fill(votes.begin(), votes.end(), 0);
    for (const auto& tree : m.trees) ++votes[static_cast<std::size_t>(tree.predict(x.row(i)))];
    out[i] = static_cast<int>(std::max_element(votes.begin(), votes.end()) - votes.begin());
  }
  return out;
}

}  // namespace dfo::detail
