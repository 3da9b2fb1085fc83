#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dfo/dataset.hpp"
#include "dfo/hyperparams.hpp"
#include "dfo/matrix.hpp"

namespace dfo {

enum class SelectorMethod : std::uint8_t { kGbdt, kRf, kLasso };

std::string_view method_name(SelectorMethod method) noexcept;  // "gbdt", "rf", "lasso"
std::optional<SelectorMethod> parse_method(std::string_view name) noexcept;

struct ImportanceRanking {
  SelectorMethod method = SelectorMethod::kGbdt;
  std::vector<double> scores;
  /// Feature indices by descending score, ties by ascending index.
  std::vector<std::size_t> order;
  /// False when the Lasso solver hit max_iter before converging.
  bool converged = true;
};

/// Builds the ranking order for `scores` under the tie rule.
ImportanceRanking make_ranking(SelectorMethod method, std::vector<double> scores);

/// Defaults: 300 trees, 31 leaves, learning rate 0.1.
HyperParams default_gbdt_selector_params();
/// Defaults: 300 trees, ceil(sqrt(d)) features per split.
HyperParams default_rf_selector_params();

ImportanceRanking rank_by_gbdt(const Matrix& x, const LabelVector& y, const HyperParams& params, std::uint64_t seed);
ImportanceRanking rank_by_rf(const Matrix& x, const LabelVector& y, const HyperParams& params, std::uint64_t seed);

struct LassoParams {
  double lambda = 0.0;
  int max_iter = 5000;
  double tolerance = 1e-6;
};

/// L1-penalized multinomial logistic regression,
///   F(W, b) = mean cross-entropy + lambda * sum |W_cj|,
/// minimized by proximal gradient with backtracking from W = 0, b = 0.
/// Every accepted step satisfies the sufficient-decrease test, so
/// objective_history is non-increasing.
struct LassoFit {
  Matrix weights;            // K x d
  std::vector<double> bias;  // K (unpenalized)
  int iterations = 0;
  bool converged = false;
  std::vector<double> objective_history;  // F at the start and after each accepted step
};

LassoFit fit_lasso(const Matrix& x, std::span<const int> y, int num_classes, const LassoParams& params);

/// Smallest lambda whose solution has W == 0: the largest |gradient| of the
/// smooth loss w.r.t. W at W = 0 with intercepts at the log class priors.
double lasso_lambda_max(const Matrix& x, std::span<const int> y, int num_classes);

/// Scores are max over classes of |W_cj|. Expects standardized x.
ImportanceRanking rank_by_lasso(const Matrix& x, const LabelVector& y, const LassoParams& params);

/// Fits the Lasso at lambda_max * factor for each grid factor and keeps the
/// fit whose argmax predictions score best on the validation rows; ties go to
/// the earlier grid entry.
struct LassoSelection {
  double lambda = 0.0;
  double val_accuracy = 0.0;
  ImportanceRanking ranking;
};
inline constexpr double kLassoGrid[] = {1e-4, 1e-3, 1e-2, 1e-1, 1.0};
LassoSelection rank_by_lasso_validated(const Matrix& x_train, const LabelVector& y_train, const Matrix& x_val,
                                       const LabelVector& y_val, std::span<const double> grid = kLassoGrid);

/// ceil(p * d), with p in (0, 1].
std::size_t subset_size(std::size_t d, double p);

/// First ceil(p*d) entries of ranking.order, sorted ascending. Throws
/// std::invalid_argument for p outside (0, 1].
std::vector<std::size_t> select_top_fraction(const ImportanceRanking& ranking, double p);

/// Column slice; idx must be strictly ascending and within [0, d).
Matrix apply_subset(const Matrix& x, std::span<const std::size_t> idx);

/// "feature_index,score,rank,method" rows in feature-index order.
std::string ranking_to_csv(const ImportanceRanking& ranking);
ImportanceRanking ranking_from_csv(std::string_view csv);

}  // namespace dfo
