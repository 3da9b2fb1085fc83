#include <algorithm>
#include <cmath>
#include <array>
#include <limits>
#include <numeric>

#include "dfo/classifiers.hpp"
#include "dfo/random.hpp"

namespace dfo::detail {

namespace {

// Forward pass for one sample; fills hidden activations and class probabilities.
void forward(const MlpModel& m, std::span<const double> xi, std::vector<double>& hidden, std::vector<double>& prob) {
  const std::size_t h = m.w1.rows(), k = m.w2.rows();
  hidden.resize(h);
  prob.resize(k);
  for (std::size_t u = 0; u < h; ++u) {
    const auto wu = m.w1.row(u);
    double s = m.b1[u];
    for (std::size_t j = 0; j < xi.size(); ++j) s += wu[j] * xi[j];
    hidden[u] = s > 0.0 ? s : 0.0;
  }
  for (std::size_t c = 0; c < k; ++c) {
    const auto wc = m.w2.row(c);
    double s = m.b2[c];
    for (std::size_t u = 0; u < h; ++u) s += wc[u] * hidden[u];
    prob[c] = s;
  }
  const double zmax = *std::max_element(prob.begin(), prob.end());
  double denom = 0.0;
  for (auto& v : prob) {
    v = std::exp(v - zmax);
    denom += v;
  }
  for (auto& v : prob) v /= denom;
}

MlpModel zeros_like(const MlpModel& m) {
  MlpModel g;
  g.w1 = Matrix(m.w1.rows(), m.w1.cols(), 0.0);
  g.b1.assign(m.b1.size(), 0.0);
  g.w2 = Matrix(m.w2.rows(), m.w2.cols(), 0.0);
  g.b2.assign(m.b2.size(), 0.0);
  return g;
}

// Loss and gradient over a subset of rows.
double batch_loss_grad(const MlpModel& m, const Matrix& x, std::span<const int> y, std::span<const std::size_t> rows,
                       double alpha, MlpModel* grad) {
  const std::size_t h = m.w1.rows(), k = m.w2.rows(), d = m.w1.cols();
  if (grad) *grad = zeros_like(m);
  std::vector<double> hidden, prob, delta_out(k), delta_hidden(h);
  double loss = 0.0;
  for (auto i : rows) {
    const auto xi = x.row(i);
    forward(m, xi, hidden, prob);
    const auto yi = static_cast<std::size_t>(y[i]);
    loss -= std::log(std::max(prob[yi], 1e-300));
    if (!grad) continue;
    for (std::size_t c = 0; c < k; ++c) delta_out[c] = prob[c] - (c == yi ? 1.0 : 0.0);
    std::fill(delta_hidden.begin(), delta_hidden.end(), 0.0);
    for (std::size_t c = 0; c < k; ++c) {
      grad->b2[c] += delta_out[c];
      auto gc = grad->w2.row(c);
      const auto wc = m.w2.row(c);
      for (std::size_t u = 0; u < h; ++u) {
        gc[u] += delta_out[c] * hidden[u];
        delta_hidden[u] += delta_out[c] * wc[u];
      }
    }
    for (std::size_t u = 0; u < h; ++u) {
      if (hidden[u] <= 0.0) continue;
      grad->b1[u] += delta_hidden[u];
      auto gu = grad->w1.row(u);
      for (std::size_t j = 0; j < d; ++j) gu[j] += delta_hidden[u] * xi[j];
    }
  }
  const double inv_n = 1.0 / static_cast<double>(rows.size());
  double sq = 0.0;
  for (double v : m.w1.values()) sq += v * v;
  for (double v : m.w2.values()) sq += v * v;
  loss = loss * inv_n + 0.5 * alpha * sq * inv_n;
  if (grad) {
    auto scale = [&](std::span<double> g, std::span<const double> w) {
      for (std::size_t t = 0; t < g.size(); ++t) g[t] = g[t] * inv_n + (w.empty() ? 0.0 : alpha * w[t] * inv_n);
    };
    scale(grad->w1.values(), m.w1.values());
    scale(grad->b1, {});
    scale(grad->w2.values(), m.w2.values());
    scale(grad->b2, {});
  }
  return loss;
}

// Views over every parameter block in a fixed order.
std::array<std::span<double>, 4> blocks(MlpModel& m) { return {m.w1.values(), m.b1, m.w2.values(), m.b2}; }

}  // namespace

double mlp_loss_grad(const MlpModel& m, const Matrix& x, std::span<const int> y, double alpha, MlpModel* grad) {
  std::vector<std::size_t> rows(x.rows());
  std::iota(rows.begin(), rows.end(), 0);
  return batch_loss_grad(m, x, y, rows, alpha, grad);
}

MlpModel fit_mlp(const Matrix& x, std::span<const int> y, int k, const HyperParams& params, std::uint64_t seed) {
  const auto hidden = static_cast<std::size_t>(params.integer("hidden", 100));
  const double lr = params.number("lr", 1e-3);
  const int max_epochs = params.integer("epochs", 200);
  const int patience = params.integer("patience", 20);
  const auto batch = static_cast<std::size_t>(params.integer("batch", 32));
  const double alpha = params.number("alpha", 1e-4);
  const std::size_t n = x.rows(), d = x.cols();
  const auto kk = static_cast<std::size_t>(k);

  Rng rng(seed);
  MlpModel m;
  m.w1 = Matrix(hidden, d);
  m.b1.assign(hidden, 0.0);
  m.w2 = Matrix(kk, hidden);
  m.b2.assign(kk, 0.0);
  // Glorot-uniform initialisation, as used for rectified units in common toolkits.
  const double bound1 = std::sqrt(6.0 / static_cast<double>(d + hidden));
  const double bound2 = std::sqrt(6.0 / static_cast<double>(hidden + kk));
  for (auto& v : m.w1.values()) v = rng.uniform(-bound1, bound1);
  for (auto& v : m.b1) v = rng.uniform(-bound1, bound1);
  for (auto& v : m.w2.values()) v = rng.uniform(-bound2, bound2);
  for (auto& v : m.b2) v = rng.uniform(-bound2, bound2);

  // Adam state.
  MlpModel first = zeros_like(m), second = zeros_like(m), grad;
  constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8, tol = 1e-4;
  std::uint64_t step = 0;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  double best_loss = std::numeric_limits<double>::infinity();
  int stale = 0;
  for (int epoch = 0; epoch < max_epochs; ++epoch) {
    rng.shuffle(std::span(order));
    for (std::size_t start = 0; start < n; start += batch) {
      const auto rows = std::span<const std::size_t>(order).subspan(start, std::min(batch, n - start));
      batch_loss_grad(m, x, y, rows, alpha, &grad);
      ++step;
      const double c1 = 1.0 - std::pow(beta1, static_cast<double>(step));
      const double c2 = 1.0 - std::pow(beta2, static_cast<double>(step));
      auto pb = blocks(m), gb = blocks(grad), mb = blocks(first), vb = blocks(second);
      for (std::size_t blk = 0; blk < pb.size(); ++blk) {
        for (std::size_t t = 0; t < pb[blk].size(); ++t) {
          const double g = gb[blk][t];
          mb[blk][t] = beta1 * mb[blk][t] + (1.0 - beta1) * g;
          vb[blk][t] = beta2 * vb[blk][t] + (1.0 - beta2) * g * g;
          pb[blk][t] -= lr * (mb[blk][t] / c1) / (std::sqrt(vb[blk][t] / c2) + eps);
        }
      }
    }
    const double loss = mlp_loss_grad(m, x, y, alpha, nullptr);
    m.loss_history.push_back(loss);
    m.epochs_run = epoch + 1;
    if (!std::isfinite(loss)) break;
    if (loss < best_loss - tol) {
      best_loss = loss;
      stale = 0;
    } else if (++stale >= patience) {
      break;
    }
  }
  return m;
}

std::vector<int> predict_mlp(const MlpModel& m, const Matrix& x) {
  std::vector<int> out(x.rows());
  std::vector<double> hidden, prob;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    forward(m, x.row(i), hidden, prob);
    out[i] = argmax(prob);
  }
  return out;
}

}  // namespace dfo::detail
