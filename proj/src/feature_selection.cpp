#include "dfo/feature_selection.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "dfo/classifiers.hpp"
#include "dfo/errors.hpp"

namespace dfo {

std::string_view method_name(SelectorMethod method) noexcept {
  switch (method) {
    case SelectorMethod::kGbdt: return "gbdt";
    case SelectorMethod::kRf: return "rf";
    case SelectorMethod::kLasso: return "lasso";
  }
  return "?";
}

std::optional<SelectorMethod> parse_method(std::string_view name) noexcept {
  for (auto m : {SelectorMethod::kGbdt, SelectorMethod::kRf, SelectorMethod::kLasso}) {
    if (method_name(m) == name) return m;
  }
  return std::nullopt;
}

ImportanceRanking make_ranking(SelectorMethod method, std::vector<double> scores) {
  ImportanceRanking r;
  r.method = method;
  r.order.resize(scores.size());
  std::iota(r.order.begin(), r.order.end(), 0);
  std::stable_sort(r.order.begin(), r.order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  r.scores = std::move(scores);
  return r;
}

HyperParams default_gbdt_selector_params() { return {{"trees", 300.0}, {"leaves", 31.0}, {"lr", 0.1}}; }

HyperParams default_rf_selector_params() { return {{"trees", 300.0}}; }

ImportanceRanking rank_by_gbdt(const Matrix& x, const LabelVector& y, const HyperParams& params, std::uint64_t seed) {
  const auto model = fit(ClassifierKind::kGBDT, x, y, params, seed);
  return make_ranking(SelectorMethod::kGbdt, gbdt_feature_gain(model));
}

ImportanceRanking rank_by_rf(const Matrix& x, const LabelVector& y, const HyperParams& params, std::uint64_t seed) {
  const auto model = fit(ClassifierKind::kRF, x, y, params, seed);
  return make_ranking(SelectorMethod::kRf, rf_feature_importance(model));
}

namespace {

double l1_norm(const Matrix& w) {
  double s = 0.0;
  for (double v : w.values()) s += std::abs(v);
  return s;
}

double soft_threshold(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

}  // namespace

LassoFit fit_lasso(const Matrix& x, std::span<const int> y, int num_classes, const LassoParams& params) {
  if (params.lambda < 0.0) throw std::invalid_argument("lasso lambda must be non-negative");
  const auto k = static_cast<std::size_t>(num_classes);
  const std::size_t d = x.cols();
  LassoFit out;
  out.weights = Matrix(k, d, 0.0);
  out.bias.assign(k, 0.0);

  Matrix grad_w, next_w(k, d);
  std::vector<double> grad_b, next_b(k);
  double smooth = detail::softmax_loss_grad(x, y, out.weights, out.bias, &grad_w, &grad_b);
  out.objective_history.push_back(smooth + params.lambda * l1_norm(out.weights));
  double step = 1.0;
  for (out.iterations = 0; out.iterations < params.max_iter;) {
    double next_smooth = 0.0;
    double change = 0.0;
    step *= 2.0;
    while (true) {
      double linear = 0.0, quad = 0.0;
      change = 0.0;
      for (std::size_t t = 0; t < k * d; ++t) {
        const double w = out.weights.values()[t];
        const double nw = soft_threshold(w - step * grad_w.values()[t], step * params.lambda);
        next_w.values()[t] = nw;
        const double delta = nw - w;
        linear += grad_w.values()[t] * delta;
        quad += delta * delta;
        change = std::max(change, std::abs(delta));
      }
      for (std::size_t c = 0; c < k; ++c) {
        next_b[c] = out.bias[c] - step * grad_b[c];
        const double delta = next_b[c] - out.bias[c];
        linear += grad_b[c] * delta;
        quad += delta * delta;
        change = std::max(change, std::abs(delta));
      }
      next_smooth = detail::softmax_loss_grad(x, y, next_w, next_b, nullptr, nullptr);
      if (next_smooth <= smooth + linear + quad / (2.0 * step) || step < 1e-12) break;
      step *= 0.5;
    }
    std::swap(out.weights, next_w);
    std::swap(out.bias, next_b);
    ++out.iterations;
    smooth = detail::softmax_loss_grad(x, y, out.weights, out.bias, &grad_w, &grad_b);
    out.objective_history.push_back(smooth + params.lambda * l1_norm(out.weights));
    if (change <= params.tolerance) {
      out.converged = true;
      break;
    }
  }
  return out;
}

double lasso_lambda_max(const Matrix& x, std::span<const int> y, int num_classes) {
  const auto k = static_cast<std::size_t>(num_classes);
  const std::size_t n = x.rows();
  std::vector<double> prior(k, 0.0);
  for (int label : y) prior[static_cast<std::size_t>(label)] += 1.0 / static_cast<double>(n);
  double best = 0.0;
  for (std::size_t j = 0; j < x.cols(); ++j) {
    for (std::size_t c = 0; c < k; ++c) {
      double g = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        g += (prior[c] - (static_cast<std::size_t>(y[i]) == c ? 1.0 : 0.0)) * x(i, j);
      }
      best = std::max(best, std::abs(g) / static_cast<double>(n));
    }
  }
  return best;
}

namespace {

ImportanceRanking ranking_from_fit(const LassoFit& fit, std::size_t d) {
  std::vector<double> scores(d, 0.0);
  for (std::size_t c = 0; c < fit.weights.rows(); ++c) {
    for (std::size_t j = 0; j < d; ++j) scores[j] = std::max(scores[j], std::abs(fit.weights(c, j)));
  }
  auto ranking = make_ranking(SelectorMethod::kLasso, std::move(scores));
  ranking.converged = fit.converged;
  return ranking;
}

}  // namespace

ImportanceRanking rank_by_lasso(const Matrix& x, const LabelVector& y, const LassoParams& params) {
  return ranking_from_fit(fit_lasso(x, y.labels, y.num_classes(), params), x.cols());
}

LassoSelection rank_by_lasso_validated(const Matrix& x_train, const LabelVector& y_train, const Matrix& x_val,
                                       const LabelVector& y_val, std::span<const double> grid) {
  const double lambda_max = lasso_lambda_max(x_train, y_train.labels, y_train.num_classes());
  LassoSelection best;
  bool have = false;
  for (double factor : grid) {
    LassoParams params;
    params.lambda = lambda_max * factor;
    const auto fit = fit_lasso(x_train, y_train.labels, y_train.num_classes(), params);
    LogisticModel as_linear{fit.weights, fit.bias, fit.iterations, 0.0};
    const auto pred = detail::predict_logistic(as_linear, x_val);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) hits += pred[i] == y_val.labels[i] ? 1 : 0;
    const double acc = pred.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(pred.size());
    if (!have || acc > best.val_accuracy) {
      best = {params.lambda, acc, ranking_from_fit(fit, x_train.cols())};
      have = true;
    }
  }
  return best;
}

std::size_t subset_size(std::size_t d, double p) {
  if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("fraction must lie in (0, 1]");
  // The slack absorbs products such as 0.3 * 10 = 3.0000000000000004.
  const auto n = static_cast<std::size_t>(std::ceil(p * static_cast<double>(d) - 1e-9));
  return std::clamp<std::size_t>(n, std::min<std::size_t>(d, 1), d);
}

std::vector<std::size_t> select_top_fraction(const ImportanceRanking& ranking, double p) {
  const std::size_t n = subset_size(ranking.order.size(), p);
  std::vector<std::size_t> idx(ranking.order.begin(), ranking.order.begin() + static_cast<std::ptrdiff_t>(n));
  std::sort(idx.begin(), idx.end());
  return idx;
}

Matrix apply_subset(const Matrix& x, std::span<const std::size_t> idx) {
  for (std::size_t t = 0; t < idx.size(); ++t) {
    if (idx[t] >= x.cols()) throw std::out_of_range("feature index " + std::to_string(idx[t]) + " out of range");
    if (t > 0 && idx[t] <= idx[t - 1]) throw std::invalid_argument("feature indices must be strictly ascending");
  }
  Matrix out(x.rows(), idx.size());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto src = x.row(i);
    auto dst = out.row(i);
    for (std::size_t t = 0; t < idx.size(); ++t) dst[t] = src[idx[t]];
  }
  return out;
}

std::string ranking_to_csv(const ImportanceRanking& ranking) {
  std::vector<std::size_t> rank(ranking.order.size());
  for (std::size_t pos = 0; pos < ranking.order.size(); ++pos) rank[ranking.order[pos]] = pos + 1;
  std::string out = "feature_index,score,rank,method\n";
  for (std::size_t j = 0; j < ranking.scores.size(); ++j) {
    out += std::to_string(j) + ',' + format_double(ranking.scores[j]) + ',' + std::to_string(rank[j]) + ',' +
           std::string(method_name(ranking.method)) + '\n';
  }
  return out;
}

ImportanceRanking ranking_from_csv(std::string_view csv) {
  std::istringstream in{std::string(csv)};
  std::string line;
  if (!std::getline(in, line) || line != "feature_index,score,rank,method") {
    throw DataError("ranking CSV has an unexpected header");
  }
  std::vector<double> scores;
  std::optional<SelectorMethod> method;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cols;
    std::stringstream row(line);
    for (std::string cell; std::getline(row, cell, ',');) cols.push_back(cell);
    if (cols.size() != 4) throw DataError("ranking CSV row has " + std::to_string(cols.size()) + " columns");
    if (std::stoull(cols[0]) != scores.size()) throw DataError("ranking CSV rows are not in feature order");
    double score = 0.0;
    const auto res = std::from_chars(cols[1].data(), cols[1].data() + cols[1].size(), score);
    if (res.ec != std::errc()) throw DataError("ranking CSV has a malformed score");
    scores.push_back(score);
    method = parse_method(cols[3]);
    if (!method) throw DataError("ranking CSV names an unknown method");
  }
  if (!method) throw DataError("ranking CSV is empty");
  return make_ranking(*method, std::move(scores));
}

}  // namespace dfo
