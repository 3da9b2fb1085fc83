#include <algorithm>
#include <cmath>

#include "dfo/classifiers.hpp"

namespace dfo::detail {

double softmax_loss_grad(const Matrix& x, std::span<const int> y, const Matrix& w, std::span<const double> b,
                         Matrix* grad_w, std::vector<double>* grad_b) {
  const std::size_t n = x.rows(), d = x.cols(), k = w.rows();
  if (grad_w) *grad_w = Matrix(k, d, 0.0);
  if (grad_b) grad_b->assign(k, 0.0);
  std::vector<double> z(k);
  double loss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto xi = x.row(i);
    for (std::size_t c = 0; c < k; ++c) {
      const auto wc = w.row(c);
      double s = b[c];
      for (std::size_t j = 0; j < d; ++j) s += wc[j] * xi[j];
      z[c] = s;
    }
    const double zmax = *std::max_element(z.begin(), z.end());
    double denom = 0.0;
    for (auto& v : z) {
      v = std::exp(v - zmax);
      denom += v;
    }
    const auto yi = static_cast<std::size_t>(y[i]);
    loss += std::log(denom) - std::log(z[yi]);
    if (!grad_w && !grad_b) continue;
    for (std::size_t c = 0; c < k; ++c) {
      const double r = z[c] / denom - (c == yi ? 1.0 : 0.0);
      if (grad_b) (*grad_b)[c] += r;
      if (grad_w) {
        auto gc = grad_w->row(c);
        for (std::size_t j = 0; j < d; ++j) gc[j] += r * xi[j];
      }
    }
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  if (grad_w) {
    for (auto& v : grad_w->values()) v *= inv_n;
  }
  if (grad_b) {
    for (auto& v : *grad_b) v *= inv_n;
  }
  return loss * inv_n;
}

namespace {

// Parameters flattened as [W row-major | b].
struct LogisticObjective {
  const Matrix& x;
  std::span<const int> y;
  std::size_t k, d;
  double l2;  // coefficient of 1/2 |W|^2

  double eval(const std::vector<double>& theta, std::vector<double>* grad) const {
    Matrix w(k, d, std::vector<double>(theta.begin(), theta.begin() + static_cast<std::ptrdiff_t>(k * d)));
    const std::span<const double> b(theta.data() + k * d, k);
    Matrix gw;
    std::vector<double> gb;
    double loss = softmax_loss_grad(x, y, w, b, grad ? &gw : nullptr, grad ? &gb : nullptr);
    for (std::size_t i = 0; i < k * d; ++i) loss += 0.5 * l2 * theta[i] * theta[i];
    if (grad) {
      grad->resize(theta.size());
      for (std::size_t i = 0; i < k * d; ++i) (*grad)[i] = gw.values()[i] + l2 * theta[i];
      for (std::size_t c = 0; c < k; ++c) (*grad)[k * d + c] = gb[c];
    }
    return loss;
  }
};

double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

LogisticModel fit_logistic(const Matrix& x, std::span<const int> y, int k, const HyperParams& params) {
  const double c_reg = params.number("C", 1.0);
  const int max_iter = params.integer("max_iter", 2000);
  const auto kk = static_cast<std::size_t>(k);
  const std::size_t d = x.cols();
  const LogisticObjective objective{x, y, kk, d, 1.0 / (c_reg * static_cast<double>(x.rows()))};

  // Accelerated gradient descent with backtracking and function-value restart.
  const std::size_t p = kk * d + kk;
  std::vector<double> theta(p, 0.0), momentum_point(p, 0.0), next(p), grad;
  double f_theta = objective.eval(theta, nullptr);
  double step_inv = 1.0;  // local Lipschitz estimate
  double t = 1.0;
  LogisticModel out;
  int iter = 0;
  for (; iter < max_iter; ++iter) {
    const double f_y = objective.eval(momentum_point, &grad);
    out.gradient_norm = norm2(grad);
    if (out.gradient_norm <= 1e-6) {
      theta = momentum_point;
      break;
    }
    const double g2 = out.gradient_norm * out.gradient_norm;
    double f_next = 0.0;
    while (true) {
      for (std::size_t i = 0; i < p; ++i) next[i] = momentum_point[i] - grad[i] / step_inv;
      f_next = objective.eval(next, nullptr);
      if (f_next <= f_y - 0.5 * g2 / step_inv || step_inv > 1e12) break;
      step_inv *= 2.0;
    }
    if (f_next > f_theta) {
      // Momentum overshot: restart from the last iterate.
      t = 1.0;
      momentum_point = theta;
      continue;
    }
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    const double beta = (t - 1.0) / t_next;
    for (std::size_t i = 0; i < p; ++i) momentum_point[i] = next[i] + beta * (next[i] - theta[i]);
    theta.swap(next);
    f_theta = f_next;
    t = t_next;
    step_inv = std::max(step_inv * 0.9, 1e-6);
  }
  out.iterations = iter;
  out.weights = Matrix(kk, d, std::vector<double>(theta.begin(), theta.begin() + static_cast<std::ptrdiff_t>(kk * d)));
  out.bias.assign(theta.begin() + static_cast<std::ptrdiff_t>(kk * d), theta.end());
  return out;
}

std::vector<int> predict_logistic(const LogisticModel& m, const Matrix& x) {
  const std::size_t k = m.weights.rows(), d = m.weights.cols();
  std::vector<int> out(x.rows());
  std::vector<double> scores(k);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto xi = x.row(i);
    for (std::size_t c = 0; c < k; ++c) {
      double s = m.bias[c];
      const auto wc = m.weights.row(c);
      for (std::size_t j = 0; j < d; ++j) s += wc[j] * xi[j];
      scores[c] = s;
    }
    out[i] = argmax(scores);
  }
  return out;
}

}  // namespace dfo::detail
