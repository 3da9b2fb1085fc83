#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

#include "dfo/classifiers.hpp"

namespace dfo {

namespace {

struct ParamRule {
  enum class Type { kReal, kInt, kChoice } type;
  double lo = 0.0;           // inclusive unless lo_open
  double hi = 1e300;
  bool lo_open = false;
  std::vector<std::string> choices = {};
};

const std::map<std::string, ParamRule, std::less<>>& rules_for(ClassifierKind kind) {
  using T = ParamRule::Type;
  static const std::map<ClassifierKind, std::map<std::string, ParamRule, std::less<>>> table = {
      {ClassifierKind::kLR, {{"C", {T::kReal, 0.0, 1e300, true}}, {"max_iter", {T::kInt, 1}}}},
      {ClassifierKind::kKNN,
       {{"k", {T::kInt, 1}}, {"metric", {T::kChoice, 0, 0, false, {"euclidean", "manhattan"}}}}},
      {ClassifierKind::kSVM,
       {{"C", {T::kReal, 0.0, 1e300, true}},
        {"kernel", {T::kChoice, 0, 0, false, {"linear", "rbf"}}},
        {"gamma", {T::kReal, 0.0, 1e300, true}},
        {"max_epochs", {T::kInt, 1}}}},
      {ClassifierKind::kMLP,
       {{"hidden", {T::kInt, 1}},
        {"lr", {T::kReal, 0.0, 1e300, true}},
        {"epochs", {T::kInt, 1}},
        {"patience", {T::kInt, 1}},
        {"batch", {T::kInt, 1}},
        {"alpha", {T::kReal, 0.0}}}},
      {ClassifierKind::kRF,
       {{"trees", {T::kInt, 1}}, {"max_depth", {T::kInt, 0}}, {"min_leaf", {T::kInt, 1}}, {"max_features", {T::kInt, 0}}}},
      {ClassifierKind::kET,
       {{"trees", {T::kInt, 1}}, {"max_depth", {T::kInt, 0}}, {"min_leaf", {T::kInt, 1}}, {"max_features", {T::kInt, 0}}}},
      {ClassifierKind::kGBDT,
       {{"trees", {T::kInt, 0}},
        {"leaves", {T::kInt, 2}},
        {"lr", {T::kReal, 0.0, 1.0, true}},
        {"min_data_in_leaf", {T::kInt, 1}},
        {"lambda", {T::kReal, 0.0}}}},
  };
  return table.at(kind);
}

}  // namespace

std::string_view kind_name(ClassifierKind kind) noexcept {
  switch (kind) {
    case ClassifierKind::kLR: return "LR";
    case ClassifierKind::kKNN: return "KNN";
    case ClassifierKind::kSVM: return "SVM";
    case ClassifierKind::kMLP: return "MLP";
    case ClassifierKind::kRF: return "RF";
    case ClassifierKind::kET: return "ET";
    case ClassifierKind::kGBDT: return "GBDT";
  }
  return "?";
}

std::string_view kind_label(ClassifierKind kind) noexcept {
  return kind == ClassifierKind::kGBDT ? "GBDT (LGBM-style)" : kind_name(kind);
}

std::optional<ClassifierKind> parse_kind(std::string_view name) noexcept {
  for (auto kind : kAllClassifierKinds) {
    if (kind_name(kind) == name) return kind;
  }
  return std::nullopt;
}

bool kind_prefers_standardized(ClassifierKind kind) noexcept {
  return kind == ClassifierKind::kLR || kind == ClassifierKind::kKNN || kind == ClassifierKind::kSVM ||
         kind == ClassifierKind::kMLP;
}

void validate_params(ClassifierKind kind, const HyperParams& params) {
  const auto& rules = rules_for(kind);
  for (const auto& [key, value] : params.values()) {
    const auto it = rules.find(key);
    if (it == rules.end()) {
      throw std::invalid_argument("'" + key + "' is not a hyperparameter of " + std::string(kind_name(kind)));
    }
    const auto& rule = it->second;
    if (rule.type == ParamRule::Type::kChoice) {
      const auto* s = std::get_if<std::string>(&value);
      if (s == nullptr || std::find(rule.choices.begin(), rule.choices.end(), *s) == rule.choices.end()) {
        throw std::invalid_argument("hyperparameter '" + key + "' has an illegal value");
      }
      continue;
    }
    const auto* v = std::get_if<double>(&value);
    if (v == nullptr || !std::isfinite(*v)) throw std::invalid_argument("hyperparameter '" + key + "' must be numeric");
    if (rule.type == ParamRule::Type::kInt && *v != std::floor(*v)) {
      throw std::invalid_argument("hyperparameter '" + key + "' must be an integer");
    }
    const bool low_ok = rule.lo_open ? *v > rule.lo : *v >= rule.lo;
    if (!low_ok || *v > rule.hi) throw std::invalid_argument("hyperparameter '" + key + "' is out of range");
  }
}

TrainedModel fit(ClassifierKind kind, const Matrix& x, const LabelVector& y, const HyperParams& params,
                 std::uint64_t seed) {
  validate_params(kind, params);
  const int k = y.num_classes();
  if (y.labels.size() != x.rows()) throw std::invalid_argument("label count does not match row count");
  if (x.rows() == 0 || x.cols() == 0) throw std::invalid_argument("cannot fit on an empty matrix");
  std::set<int> present;
  for (int label : y.labels) {
    if (label < 0 || label >= k) throw std::invalid_argument("label out of range");
    present.insert(label);
  }
  if (present.size() < 2) throw std::invalid_argument("training labels must cover at least two classes");

  const std::span<const int> labels(y.labels);
  ModelPayload payload = [&]() -> ModelPayload {
    switch (kind) {
      case ClassifierKind::kLR: return detail::fit_logistic(x, labels, k, params);
      case ClassifierKind::kKNN: return detail::fit_knn(x, labels, params);
      case ClassifierKind::kSVM: return detail::fit_svm(x, labels, k, params, seed);
      case ClassifierKind::kMLP: return detail::fit_mlp(x, labels, k, params, seed);
      case ClassifierKind::kRF: return detail::fit_forest(x, labels, k, params, false, seed);
      case ClassifierKind::kET: return detail::fit_forest(x, labels, k, params, true, seed);
      case ClassifierKind::kGBDT: return detail::fit_gbdt(x, labels, k, params);
    }
    throw std::logic_error("unknown classifier kind");
  }();
  return TrainedModel(kind, k, x.cols(), seed, std::move(payload));
}

std::vector<int> predict(const TrainedModel& model, const Matrix& x) {
  if (x.cols() != model.input_dim()) {
    throw std::invalid_argument("model expects " + std::to_string(model.input_dim()) + " features, got " +
                                std::to_string(x.cols()));
  }
  const int k = model.num_classes();
  switch (model.kind()) {
    case ClassifierKind::kLR: return detail::predict_logistic(model.as<LogisticModel>(), x);
    case ClassifierKind::kKNN: return detail::predict_knn(model.as<KnnModel>(), k, x);
    case ClassifierKind::kSVM: return detail::predict_svm(model.as<SvmModel>(), x);
    case ClassifierKind::kMLP: return detail::predict_mlp(model.as<MlpModel>(), x);
    case ClassifierKind::kRF:
    case ClassifierKind::kET: return detail::predict_forest(model.as<ForestModel>(), k, x);
    case ClassifierKind::kGBDT: return detail::predict_gbdt(model.as<GbdtModel>(), k, x);
  }
  throw std::logic_error("unknown classifier kind");
}

std::vector<double> gbdt_feature_gain(const TrainedModel& model) {
  if (model.kind() != ClassifierKind::kGBDT) throw std::invalid_argument("gbdt_feature_gain needs a GBDT model");
  std::vector<double> gain(model.input_dim(), 0.0);
  for (const auto& tree : model.as<GbdtModel>().trees) {
    for (const auto& node : tree) {
      if (!node.is_leaf()) gain[static_cast<std::size_t>(node.feature)] += node.gain;
    }
  }
  return gain;
}

std::vector<double> rf_feature_importance(const TrainedModel& model) {
  if (model.kind() != ClassifierKind::kRF && model.kind() != ClassifierKind::kET) {
    throw std::invalid_argument("rf_feature_importance needs an RF or ET model");
  }
  const std::size_t d = model.input_dim();
  std::vector<double> total(d, 0.0);
  std::vector<double> per_tree(d);
  for (const auto& tree : model.as<ForestModel>().trees) {
    std::fill(per_tree.begin(), per_tree.end(), 0.0);
    double sum = 0.0;
    for (const auto& node : tree.nodes()) {
      if (node.is_leaf() || node.gain <= 0.0) continue;
      per_tree[static_cast<std::size_t>(node.feature)] += node.gain;
      sum += node.gain;
    }
    if (sum <= 0.0) continue;
    for (std::size_t j = 0; j < d; ++j) total[j] += per_tree[j] / sum;
  }
  double sum = 0.0;
  for (double v : total) sum += v;
  if (sum > 0.0) {
    for (auto& v : total) v /= sum;
  }
  return total;
}

namespace detail {

int argmax(std::span<const double> scores) noexcept {
  int best = 0;
  for (std::size_t c = 1; c < scores.size(); ++c) {
    if (scores[c] > scores[static_cast<std::size_t>(best)]) best = static_cast<int>(c);
  }
  return best;
}

}  // namespace detail

}  // namespace dfo
