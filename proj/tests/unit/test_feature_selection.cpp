#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "dfo/classifiers.hpp"
#include "dfo/feature_selection.hpp"
#include "support/synthetic.hpp"

using namespace dfo;
using dfo::testing::gaussian_blobs;
using dfo::testing::injected_signal;

namespace {

bool all_zero(const Matrix& w) {
  return std::all_of(w.values().begin(), w.values().end(), [](double v) { return v == 0.0; });
}

std::size_t nonzero(const Matrix& w, std::size_t col_begin = 0) {
  std::size_t count = 0;
  for (std::size_t j = col_begin; j < w.cols(); ++j) {
    bool any = false;
    for (std::size_t c = 0; c < w.rows(); ++c) any |= w(c, j) != 0.0;
    count += any;
  }
  return count;
}

Matrix standardized(const Matrix& x) { return standardize_fit(x).apply(x); }

}  // namespace

TEST_CASE("method names round trip") {
  for (auto m : {SelectorMethod::kGbdt, SelectorMethod::kRf, SelectorMethod::kLasso}) {
    CHECK(parse_method(method_name(m)) == m);
  }
  CHECK(!parse_method("pca").has_value());
}

TEST_CASE("subset size reproduces the published dimensions") {
  const double fractions[] = {0.5, 0.4, 0.3, 0.2, 0.1, 0.05};
  const std::size_t expect768[] = {384, 308, 231, 154, 77, 39};
  for (int i = 0; i < 6; ++i) CHECK(subset_size(768, fractions[i]) == expect768[i]);
  CHECK(subset_size(1024, 0.1) == 103);
  CHECK(subset_size(2048, 0.1) == 205);
  CHECK(subset_size(320, 0.5) == 160);
  CHECK(subset_size(7, 1.0) == 7);
  CHECK(subset_size(1, 0.05) == 1);
}

TEST_CASE("subset size equals the exact rational ceiling") {
  // p = k / 100 exactly; ceil(k*d/100) in integer arithmetic.
  for (std::size_t d = 1; d <= 2048; ++d) {
    for (std::size_t k = 1; k <= 100; ++k) {
      const std::size_t exact = (k * d + 99) / 100;
      if (subset_size(d, static_cast<double>(k) / 100.0) != exact) {
        CAPTURE(d);
        CAPTURE(k);
        FAIL("mismatch");
      }
    }
  }
}

TEST_CASE("rankings sort by score with index tie-break and subsets nest") {
  const auto r = make_ranking(SelectorMethod::kRf, {0.1, 0.5, 0.1, 0.9, 0.0, 0.5});
  CHECK(r.order == std::vector<std::size_t>{3, 1, 5, 0, 2, 4});
  CHECK(select_top_fraction(r, 0.5) == std::vector<std::size_t>{1, 3, 5});
  CHECK(select_top_fraction(r, 0.05) == std::vector<std::size_t>{3});
  CHECK(select_top_fraction(r, 1.0) == std::vector<std::size_t>{0, 1, 2, 3, 4, 5});
  CHECK_THROWS_AS(select_top_fraction(r, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(select_top_fraction(r, 1.5), std::invalid_argument);

  Rng rng(3);
  std::vector<double> scores(97);
  for (auto& s : scores) s = std::floor(rng.uniform() * 20);  // many ties
  const auto big = make_ranking(SelectorMethod::kGbdt, scores);
  std::vector<std::size_t> prev;
  for (double p : {0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 1.0}) {
    const auto cur = select_top_fraction(big, p);
    CHECK(std::includes(cur.begin(), cur.end(), prev.begin(), prev.end()));
    prev = cur;
  }
}

TEST_CASE("apply_subset slices columns") {
  Matrix x(2, 4);
  for (std::size_t i = 0; i < 8; ++i) x.values()[i] = static_cast<double>(i);
  const std::size_t idx[] = {1, 3};
  const auto s = apply_subset(x, idx);
  CHECK(s.cols() == 2);
  CHECK(s(0, 0) == 1);
  CHECK(s(1, 1) == 7);
}

TEST_CASE("ranking CSV round trips") {
  auto r = make_ranking(SelectorMethod::kLasso, {0.25, 0.0, 1.0 / 3.0, 1e-300});
  const auto csv = ranking_to_csv(r);
  CHECK(csv.rfind("feature_index,score,rank,method\n", 0) == 0);
  const auto back = ranking_from_csv(csv);
  CHECK(back.method == SelectorMethod::kLasso);
  CHECK(back.scores == r.scores);
  CHECK(back.order == r.order);
  CHECK_THROWS(ranking_from_csv("nonsense"));
}

TEST_CASE("lasso objective never increases") {
  const auto data = gaussian_blobs(40, 6, 3, 1.0, 2);
  const auto x = standardized(data.x);
  const double lmax = lasso_lambda_max(x, data.y.labels, 3);
  for (double f : {0.0, 0.01, 0.1, 0.5}) {
    const auto fit = fit_lasso(x, data.y.labels, 3, {f * lmax, 5000, 1e-8});
    REQUIRE(fit.objective_history.size() >= 2);
    for (std::size_t i = 1; i < fit.objective_history.size(); ++i) {
      CHECK(fit.objective_history[i] <= fit.objective_history[i - 1]);
    }
  }
}

TEST_CASE("lambda_max is the zero threshold, confirmed by bisection") {
  const auto data = gaussian_blobs(30, 5, 3, 1.0, 4);
  const auto x = standardized(data.x);
  const double lmax = lasso_lambda_max(x, data.y.labels, 3);
  CHECK(all_zero(fit_lasso(x, data.y.labels, 3, {lmax * (1 + 1e-9), 5000, 1e-10}).weights));
  CHECK(all_zero(fit_lasso(x, data.y.labels, 3, {lmax * 2, 5000, 1e-10}).weights));

  double lo = 0.0, hi = 2.0 * lmax;
  for (int it = 0; it < 30; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (all_zero(fit_lasso(x, data.y.labels, 3, {mid, 20000, 1e-12}).weights)) hi = mid;
    else lo = mid;
  }
  CHECK(hi == doctest::Approx(lmax).epsilon(1e-3));
}

TEST_CASE("lasso at lambda 0 keeps every feature and agrees with LR") {
  const auto data = gaussian_blobs(60, 6, 3, 0.8, 5);
  const auto x = standardized(data.x);
  const auto fit = fit_lasso(x, data.y.labels, 3, {0.0, 20000, 1e-9});
  CHECK(nonzero(fit.weights) == 6);

  const auto lr = dfo::fit(ClassifierKind::kLR, x, data.y, {{"C", 1e8}, {"max_iter", 20000.0}}, 0);
  const auto lr_pred = predict(lr, x);
  std::size_t agree = 0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    std::vector<double> s(3);
    for (int c = 0; c < 3; ++c) {
      s[c] = fit.bias[c];
      for (std::size_t j = 0; j < 6; ++j) s[c] += fit.weights(c, j) * x(i, j);
    }
    agree += detail::argmax(s) == lr_pred[i];
  }
  CHECK(agree == x.rows());
}

TEST_CASE("injected signal is ranked first by every selector") {
  const auto data = injected_signal(200, 16, 9, 31);
  CHECK(rank_by_gbdt(data.x, data.y, default_gbdt_selector_params(), 1).order.front() == 9);
  CHECK(rank_by_rf(data.x, data.y, default_rf_selector_params(), 1).order.front() == 9);
  const auto x = standardized(data.x);
  const double lmax = lasso_lambda_max(x, data.y.labels, 2);
  const auto lasso = rank_by_lasso(x, data.y, {0.1 * lmax, 5000, 1e-6});
  CHECK(lasso.order.front() == 9);
  CHECK(lasso.converged);
}

TEST_CASE("validated lasso picks a grid lambda") {
  const auto train = gaussian_blobs(40, 8, 3, 2.0, 6);
  const auto val = gaussian_blobs(15, 8, 3, 2.0, 7);
  const auto s = standardize_fit(train.x);
  const auto sel = rank_by_lasso_validated(s.apply(train.x), train.y, s.apply(val.x), val.y);
  const double lmax = lasso_lambda_max(s.apply(train.x), train.y.labels, 3);
  bool on_grid = false;
  for (double f : kLassoGrid) on_grid |= std::abs(sel.lambda - f * lmax) <= 1e-12 * lmax;
  CHECK(on_grid);
  CHECK(sel.val_accuracy > 0.8);
  CHECK(sel.ranking.scores.size() == 8);
}
