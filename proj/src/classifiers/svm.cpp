#include <algorithm>
#include <cmath>
#include <numeric>

#include "dfo/classifiers.hpp"

namespace dfo::detail {

namespace {

double rbf(std::span<const double> a, std::span<const double> b, double gamma) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double diff = a[j] - b[j];
    s += diff * diff;
  }
  return std::exp(-gamma * s);
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += a[j] * b[j];
  return s;
}

}  // namespace

DualResult solve_hinge_dual(const Matrix& gram, std::span<const double> sign, double c, double tol, int max_epochs,
                            Rng& rng) {
  const std::size_t n = gram.rows();
  DualResult out;
  out.alpha.assign(n, 0.0);
  // s_i = sum_j alpha_j y_j G_ij, so the gradient is y_i s_i - 1.
  std::vector<double> s(n, 0.0);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (out.epochs = 0; out.epochs < max_epochs;) {
    rng.shuffle(std::span(order));
    double violation = 0.0;
    for (auto i : order) {
      const double g = sign[i] * s[i] - 1.0;
      double pg = g;
      if (out.alpha[i] <= 0.0) pg = std::min(g, 0.0);
      else if (out.alpha[i] >= c) pg = std::max(g, 0.0);
      violation = std::max(violation, std::abs(pg));
      if (pg == 0.0) continue;
      const double q_ii = gram(i, i);
      const double updated = std::clamp(out.alpha[i] - g / q_ii, 0.0, c);
      const double delta = (updated - out.alpha[i]) * sign[i];
      out.alpha[i] = updated;
      if (delta == 0.0) continue;
      const auto gi = gram.row(i);
      for (std::size_t j = 0; j < n; ++j) s[j] += delta * gi[j];
    }
    ++out.epochs;
    out.max_violation = violation;
    if (violation <= tol) {
      out.converged = true;
      break;
    }
  }
  // Report the violation of the final iterate, not of the last sweep.
  double final_violation = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double g = sign[i] * s[i] - 1.0;
    double pg = g;
    if (out.alpha[i] <= 0.0) pg = std::min(g, 0.0);
    else if (out.alpha[i] >= c) pg = std::max(g, 0.0);
    final_violation = std::max(final_violation, std::abs(pg));
  }
  out.max_violation = final_violation;
  out.converged = final_violation <= tol;
  return out;
}

SvmModel fit_svm(const Matrix& x, std::span<const int> y, int k, const HyperParams& params, std::uint64_t seed) {
  const double c = params.number("C", 1.0);
  const bool rbf_kernel = params.text("kernel", "rbf") == "rbf";
  const double gamma = params.number("gamma", 1.0 / static_cast<double>(x.cols()));
  const int max_epochs = params.integer("max_epochs", 1000);
  const std::size_t n = x.rows(), d = x.cols();
  const auto kk = static_cast<std::size_t>(k);

  Matrix gram(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const double v = (rbf_kernel ? rbf(x.row(i), x.row(j), gamma) : dot(x.row(i), x.row(j))) + 1.0;
      gram(i, j) = v;
      gram(j, i) = v;
    }
  }

  SvmModel m;
  m.kernel = rbf_kernel ? SvmModel::Kernel::kRbf : SvmModel::Kernel::kLinear;
  m.gamma = rbf_kernel ? gamma : 0.0;
  m.bias.assign(kk, 0.0);
  std::vector<std::vector<double>> alphas(kk);
  std::vector<double> sign(n);
  for (std::size_t cls = 0; cls < kk; ++cls) {
    for (std::size_t i = 0; i < n; ++i) sign[i] = static_cast<std::size_t>(y[i]) == cls ? 1.0 : -1.0;
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(cls)));
    auto result = solve_hinge_dual(gram, sign, c, 1e-4, max_epochs, rng);
    m.max_violation.push_back(result.max_violation);
    for (std::size_t i = 0; i < n; ++i) {
      result.alpha[i] *= sign[i];
      m.bias[cls] += result.alpha[i];
    }
    alphas[cls] = std::move(result.alpha);
  }

  if (!rbf_kernel) {
    m.basis = Matrix(kk, d, 0.0);
    for (std::size_t cls = 0; cls < kk; ++cls) {
      auto w = m.basis.row(cls);
      for (std::size_t i = 0; i < n; ++i) {
        if (alphas[cls][i] == 0.0) continue;
        const auto xi = x.row(i);
        for (std::size_t j = 0; j < d; ++j) w[j] += alphas[cls][i] * xi[j];
      }
    }
    return m;
  }

  std::vector<std::size_t> support;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t cls = 0; cls < kk; ++cls) {
      if (alphas[cls][i] != 0.0) {
        support.push_back(i);
        break;
      }
    }
  }
  m.basis = take_rows(x, support);
  m.coef = Matrix(kk, support.size());
  for (std::size_t cls = 0; cls < kk; ++cls) {
    for (std::size_t s = 0; s < support.size(); ++s) m.coef(cls, s) = alphas[cls][support[s]];
  }
  return m;
}

std::vector<int> predict_svm(const SvmModel& m, const Matrix& x) {
  const std::size_t k = m.bias.size();
  std::vector<int> out(x.rows());
  std::vector<double> margin(k);
  std::vector<double> kernel_row(m.basis.rows());
  for (std::size_t q = 0; q < x.rows(); ++q) {
    const auto xq = x.row(q);
    if (m.kernel == SvmModel::Kernel::kLinear) {
      for (std::size_t c = 0; c < k; ++c) margin[c] = dot(m.basis.row(c), xq) + m.bias[c];
    } else {
      for (std::size_t s = 0; s < m.basis.rows(); ++s) kernel_row[s] = rbf(m.basis.row(s), xq, m.gamma);
      for (std::size_t c = 0; c < k; ++c) margin[c] = dot(m.coef.row(c), kernel_row) + m.bias[c];
    }
    out[q] = argmax(margin);
  }
  return out;
}

}  // namespace dfo::detail
