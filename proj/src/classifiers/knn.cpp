#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dfo/classifiers.hpp"

namespace dfo::detail {

KnnModel fit_knn(const Matrix& x, std::span<const int> y, const HyperParams& params) {
  KnnModel m;
  m.k = params.integer("k", 5);
  const auto metric = params.text("metric", "euclidean");
  m.metric = metric == "manhattan" ? KnnModel::Metric::kManhattan : KnnModel::Metric::kEuclidean;
  m.train_x = x;
  m.train_y.assign(y.begin(), y.end());
  return m;
}

std::vector<int> predict_knn(const KnnModel& m, int k, const Matrix& x) {
  const std::size_t n = m.train_x.rows(), d = m.train_x.cols();
  const std::size_t neighbours = std::min<std::size_t>(static_cast<std::size_t>(m.k), n);
  std::vector<int> out(x.rows());
  std::vector<std::pair<double, std::size_t>> dist(n);
  std::vector<int> votes(static_cast<std::size_t>(k));
  for (std::size_t q = 0; q < x.rows(); ++q) {
    const auto xq = x.row(q);
    for (std::size_t i = 0; i < n; ++i) {
      const auto xi = m.train_x.row(i);
      double acc = 0.0;
      if (m.metric == KnnModel::Metric::kEuclidean) {
        for (std::size_t j = 0; j < d; ++j) {
          const double diff = xq[j] - xi[j];
          acc += diff * diff;
        }
      } else {
        for (std::size_t j = 0; j < d; ++j) acc += std::abs(xq[j] - xi[j]);
      }
      dist[i] = {acc, i};
    }
    // Distance ties resolve toward the earlier training row.
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(neighbours), dist.end());
    std::fill(votes.begin(), votes.end(), 0);
    for (std::size_t t = 0; t < neighbours; ++t) ++votes[static_cast<std::size_t>(m.train_y[dist[t].second])];
    out[q] = static_cast<int>(std::max_element(votes.begin(), votes.end()) - votes.begin());
  }
  return out;
}

}  // namespace dfo::detail
