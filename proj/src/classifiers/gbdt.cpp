#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>

#include "dfo/classifiers.hpp"

namespace dfo::detail {

namespace {

constexpr std::size_t kMaxBins = 256;
constexpr double kMinHessian = 1e-3;

double midpoint(double lo, double hi) {
  const double mid = lo + (hi - lo) / 2.0;
  return (mid >= hi || mid < lo) ? lo : mid;
}

// Quantized copy of the training matrix. A value v falls in bin b when
// thresholds[b-1] < v <= thresholds[b]; cut points sit midway between
// neighbouring distinct values and are chosen by rank, so any strictly
// increasing transform of a column yields the same bins.
struct BinnedMatrix {
  std::size_t rows = 0;
  std::vector<std::vector<double>> thresholds;  // per feature, ascending
  std::vector<std::uint8_t> bins;               // column-major

  std::uint8_t at(std::size_t feature, std::size_t row) const { return bins[feature * rows + row]; }
};

BinnedMatrix bin_matrix(const Matrix& x) {
  BinnedMatrix out;
  const std::size_t n = x.rows(), d = x.cols();
  out.rows = n;
  out.thresholds.resize(d);
  out.bins.resize(n * d);
  std::vector<double> sorted(n);
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t i = 0; i < n; ++i) sorted[i] = x(i, j);
    std::sort(sorted.begin(), sorted.end());
    auto& cuts = out.thresholds[j];
    std::vector<double> uniq(sorted);
    uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
    if (uniq.size() <= kMaxBins) {
      for (std::size_t t = 0; t + 1 < uniq.size(); ++t) cuts.push_back(midpoint(uniq[t], uniq[t + 1]));
    } else {
      for (std::size_t b = 1; b < kMaxBins; ++b) {
        const std::size_t pos = b * n / kMaxBins;  // cut after sorted[pos - 1]
        const double below = sorted[pos - 1];
        const auto next = std::upper_bound(uniq.begin(), uniq.end(), below);
        if (next == uniq.end()) continue;
        const double cut = midpoint(below, *next);
        if (cuts.empty() || cut > cuts.back()) cuts.push_back(cut);
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      const auto it = std::lower_bound(cuts.begin(), cuts.end(), x(i, j));
      out.bins[j * n + i] = static_cast<std::uint8_t>(it - cuts.begin());
    }
  }
  return out;
}

struct SplitChoice {
  int feature = -1;
  std::size_t bin = 0;
  double gain = 0.0;
};

struct GrowthParams {
  std::size_t max_leaves;
  std::size_t min_data;
  double lambda;
};

double leaf_score(double g, double h, double lambda) { return g * g / (h + lambda); }

SplitChoice best_split(const BinnedMatrix& binned, std::span<const std::size_t> rows, std::span<const double> grad,
                       std::span<const double> hess, const GrowthParams& p) {
  SplitChoice best;
  if (rows.size() < 2 * p.min_data) return best;
  double g_total = 0.0, h_total = 0.0;
  for (auto r : rows) {
    g_total += grad[r];
    h_total += hess[r];
  }
  const double parent = leaf_score(g_total, h_total, p.lambda);
  std::array<double, kMaxBins> hg{}, hh{};
  std::array<std::size_t, kMaxBins> hc{};
  for (std::size_t j = 0; j < binned.thresholds.size(); ++j) {
    const std::size_t nb = binned.thresholds[j].size() + 1;
    if (nb < 2) continue;
    std::fill_n(hg.begin(), nb, 0.0);
    std::fill_n(hh.begin(), nb, 0.0);
    std::fill_n(hc.begin(), nb, 0);
    const std::uint8_t* col = binned.bins.data() + j * binned.rows;
    for (auto r : rows) {
      const auto b = col[r];
      hg[b] += grad[r];
      hh[b] += hess[r];
      ++hc[b];
    }
    double gl = 0.0, hl = 0.0;
    std::size_t cl = 0;
    for (std::size_t b = 0; b + 1 < nb; ++b) {
      gl += hg[b];
      hl += hh[b];
      cl += hc[b];
      const std::size_t cr = rows.size() - cl;
      if (cl < p.min_data) continue;
      if (cr < p.min_data) break;
      const double hr = h_total - hl;
      if (hl < kMinHessian || hr < kMinHessian) continue;
      const double gain =
          0.5 * (leaf_score(gl, hl, p.lambda) + leaf_score(g_total - gl, hr, p.lambda) - parent);
      if (gain > best.gain) {
        best.feature = static_cast<int>(j);
        best.bin = b;
        best.gain = gain;
      }
    }
  }
  return best;
}

struct OpenLeaf {
  int node;
  std::vector<std::size_t> rows;
  SplitChoice split;
};

// Leaf-wise growth: repeatedly split the open leaf with the largest gain.
std::vector<GbdtNode> grow_leaf_wise(const BinnedMatrix& binned, std::span<const double> grad,
                                     std::span<const double> hess, const GrowthParams& p, double learning_rate,
                                     std::vector<double>& score_update) {
  std::vector<GbdtNode> nodes(1);
  std::vector<OpenLeaf> leaves;
  std::vector<std::size_t> all(binned.rows);
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  leaves.push_back({0, std::move(all), {}});
  leaves[0].split = best_split(binned, leaves[0].rows, grad, hess, p);

  while (leaves.size() < p.max_leaves) {
    std::size_t pick = leaves.size();
    for (std::size_t l = 0; l < leaves.size(); ++l) {
      if (leaves[l].split.feature < 0) continue;
      if (pick == leaves.size() || leaves[l].split.gain > leaves[pick].split.gain) pick = l;
    }
    if (pick == leaves.size()) break;

    OpenLeaf parent = std::move(leaves[pick]);
    const auto f = static_cast<std::size_t>(parent.split.feature);
    std::vector<std::size_t> left, right;
    for (auto r : parent.rows) (binned.at(f, r) <= parent.split.bin ? left : right).push_back(r);

    const int left_id = static_cast<int>(nodes.size());
    nodes.emplace_back();
    nodes.emplace_back();
    auto& node = nodes[static_cast<std::size_t>(parent.node)];
    node.feature = parent.split.feature;
    node.threshold = binned.thresholds[f][parent.split.bin];
    node.gain = parent.split.gain;
    node.left = left_id;
    node.right = left_id + 1;

    OpenLeaf l{left_id, std::move(left), {}};
    OpenLeaf r{left_id + 1, std::move(right), {}};
    l.split = best_split(binned, l.rows, grad, hess, p);
    r.split = best_split(binned, r.rows, grad, hess, p);
    leaves[pick] = std::move(l);
    leaves.insert(leaves.begin() + static_cast<std::ptrdiff_t>(pick) + 1, std::move(r));
  }

  for (const auto& leaf : leaves) {
    double g = 0.0, h = 0.0;
    for (auto r : leaf.rows) {
      g += grad[r];
      h += hess[r];
    }
    const double value = -g / (h + p.lambda) * learning_rate;
    nodes[static_cast<std::size_t>(leaf.node)].value = value;
    for (auto r : leaf.rows) score_update[r] = value;
  }
  return nodes;
}

double mean_cross_entropy(const Matrix& scores, std::span<const int> y) {
  double loss = 0.0;
  for (std::size_t i = 0; i < scores.rows(); ++i) {
    const auto s = scores.row(i);
    const double zmax = *std::max_element(s.begin(), s.end());
    double denom = 0.0;
    for (double v : s) denom += std::exp(v - zmax);
    loss += std::log(denom) + zmax - s[static_cast<std::size_t>(y[i])];
  }
  return loss / static_cast<double>(scores.rows());
}

double tree_output(const std::vector<GbdtNode>& tree, std::span<const double> x) {
  const GbdtNode* node = &tree.front();
  while (!node->is_leaf()) {
    node = &tree[static_cast<std::size_t>(x[static_cast<std::size_t>(node->feature)] <= node->threshold ? node->left
                                                                                                       : node->right)];
  }
  return node->value;
}

}  // namespace

GbdtModel fit_gbdt(const Matrix& x, std::span<const int> y, int k, const HyperParams& params) {
  const int stages = params.integer("trees", 100);
  const double lr = params.number("lr", 0.1);
  const GrowthParams growth{static_cast<std::size_t>(params.integer("leaves", 31)),
                            static_cast<std::size_t>(params.integer("min_data_in_leaf", 20)),
                            params.number("lambda", 1.0)};
  const std::size_t n = x.rows();
  const auto kk = static_cast<std::size_t>(k);

  GbdtModel m;
  std::vector<double> prior(kk, 0.0);
  for (int label : y) prior[static_cast<std::size_t>(label)] += 1.0;
  for (auto& p : prior) m.init_score.push_back(std::log(std::max(p / static_cast<double>(n), 1e-15)));

  Matrix scores(n, kk);
  for (std::size_t i = 0; i < n; ++i) std::copy(m.init_score.begin(), m.init_score.end(), scores.row(i).begin());
  m.train_loss.push_back(mean_cross_entropy(scores, y));
  if (stages == 0) return m;

  const BinnedMatrix binned = bin_matrix(x);
  Matrix prob(n, kk);
  std::vector<double> grad(n), hess(n), update(n);
  for (int stage = 0; stage < stages; ++stage) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto s = scores.row(i);
      const double zmax = *std::max_element(s.begin(), s.end());
      double denom = 0.0;
      for (std::size_t c = 0; c < kk; ++c) denom += (prob(i, c) = std::exp(s[c] - zmax));
      for (std::size_t c = 0; c < kk; ++c) prob(i, c) /= denom;
    }
    for (std::size_t c = 0; c < kk; ++c) {
      for (std::size_t i = 0; i < n; ++i) {
        const double p = prob(i, c);
        grad[i] = p - (static_cast<std::size_t>(y[i]) == c ? 1.0 : 0.0);
        hess[i] = std::max(p * (1.0 - p), 1e-16);
      }
      m.trees.push_back(grow_leaf_wise(binned, grad, hess, growth, lr, update));
      for (std::size_t i = 0; i < n; ++i) scores(i, c) += update[i];
    }
    m.train_loss.push_back(mean_cross_entropy(scores, y));
  }
  return m;
}

std::vector<int> predict_gbdt(const GbdtModel& m, int k, const Matrix& x) {
  const auto kk = static_cast<std::size_t>(k);
  std::vector<int> out(x.rows());
  std::vector<double> score(kk);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    std::copy(m.init_score.begin(), m.init_score.end(), score.begin());
    for (std::size_t t = 0; t < m.trees.size(); ++t) score[t % kk] += tree_output(m.trees[t], x.row(i));
    out[i] = argmax(score);
  }
  return out;
}

}  // namespace dfo::detail
