#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "dfo/dataset.hpp"
#include "dfo/decision_tree.hpp"
#include "dfo/errors.hpp"
#include "dfo/hyperparams.hpp"
#include "dfo/matrix.hpp"

namespace dfo {

enum class ClassifierKind : std::uint8_t { kLR = 0, kKNN = 1, kSVM = 2, kMLP = 3, kRF = 4, kET = 5, kGBDT = 6 };

inline constexpr std::array<ClassifierKind, 7> kAllClassifierKinds{
    ClassifierKind::kLR, ClassifierKind::kKNN, ClassifierKind::kSVM, ClassifierKind::kMLP,
    ClassifierKind::kRF, ClassifierKind::kET,  ClassifierKind::kGBDT};

/// Short code: "LR", "KNN", "SVM", "MLP", "RF", "ET", "GBDT".
std::string_view kind_name(ClassifierKind kind) noexcept;
/// Column label used in rendered tables ("GBDT (LGBM-style)" for GBDT).
std::string_view kind_label(ClassifierKind kind) noexcept;
std::optional<ClassifierKind> parse_kind(std::string_view name) noexcept;
/// LR, KNN, SVM and MLP expect standardized inputs; tree models do not.
bool kind_prefers_standardized(ClassifierKind kind) noexcept;

// ---------------------------------------------------------------------------
// Fitted parameter blocks, one per kind.

struct LogisticModel {
  Matrix weights;             // K x d
  std::vector<double> bias;   // K
  int iterations = 0;
  double gradient_norm = 0.0;
};

struct KnnModel {
  enum class Metric : std::uint8_t { kEuclidean = 0, kManhattan = 1 };
  int k = 1;
  Metric metric = Metric::kEuclidean;
  Matrix train_x;
  std::vector<int> train_y;
};

struct SvmModel {
  enum class Kernel : std::uint8_t { kLinear = 0, kRbf = 1 };
  Kernel kernel = Kernel::kLinear;
  double gamma = 0.0;
  /// Linear: K x d primal weights. RBF: the support vectors (n_sv x d).
  Matrix basis;
  /// RBF only: K x n_sv dual coefficients alpha_i * y_i.
  Matrix coef;
  std::vector<double> bias;            // K
  std::vector<double> max_violation;   // per one-vs-rest machine at exit
};

struct MlpModel {
  Matrix w1;                 // hidden x d
  std::vector<double> b1;    // hidden
  Matrix w2;                 // K x hidden
  std::vector<double> b2;    // K
  int epochs_run = 0;
  std::vector<double> loss_history;
};

struct ForestModel {
  bool bootstrap = true;
  std::vector<DecisionTree> trees;
};

struct GbdtNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;  // leaf output, learning rate already applied
  double gain = 0.0;   // loss reduction of the split (internal nodes)

  bool is_leaf() const noexcept { return feature < 0; }
  bool operator==(const GbdtNode&) const = default;
};

struct GbdtModel {
  std::vector<double> init_score;           // K
  std::vector<std::vector<GbdtNode>> trees; // stage-major: trees[stage * K + class]
  /// Mean training cross-entropy after the initial score and after each stage.
  std::vector<double> train_loss;
};

using ModelPayload = std::variant<LogisticModel, KnnModel, SvmModel, MlpModel, ForestModel, GbdtModel>;

/// A fitted classifier. Immutable after fit; predict is reentrant.
class TrainedModel {
 public:
  TrainedModel(ClassifierKind kind, int num_classes, std::size_t input_dim, std::uint64_t seed, ModelPayload payload)
      : kind_(kind), num_classes_(num_classes), input_dim_(input_dim), seed_(seed), payload_(std::move(payload)) {}

  ClassifierKind kind() const noexcept { return kind_; }
  int num_classes() const noexcept { return num_classes_; }
  std::size_t input_dim() const noexcept { return input_dim_; }
  std::uint64_t seed() const noexcept { return seed_; }
  const ModelPayload& payload() const noexcept { return payload_; }

  template <typename T>
  const T& as() const {
    return std::get<T>(payload_);
  }

 private:
  ClassifierKind kind_;
  int num_classes_;
  std::size_t input_dim_;
  std::uint64_t seed_;
  ModelPayload payload_;
};

/// Throws std::invalid_argument when a key is not legal for the kind or a
/// value lies outside its declared range.
void validate_params(ClassifierKind kind, const HyperParams& params);

/// Fits one classifier. Deterministic in (x, y, params, seed). Labels must
/// lie in [0, y.num_classes()) and cover at least two classes.
TrainedModel fit(ClassifierKind kind, const Matrix& x, const LabelVector& y, const HyperParams& params,
                 std::uint64_t seed);

/// Predicted class per row. Throws std::invalid_argument on a width mismatch.
std::vector<int> predict(const TrainedModel& model, const Matrix& x);

/// Total split gain per feature over every tree and stage (GBDT only).
std::vector<double> gbdt_feature_gain(const TrainedModel& model);

/// Mean decrease in impurity per feature (RF and ET), summing to 1 when any
/// split carries positive gain and all zeros otherwise.
std::vector<double> rf_feature_importance(const TrainedModel& model);

/// Binary container: "DFOM", u16 version, u8 kind, u32 K, u32 d, u64 seed,
/// then the kind payload. Layout documented in docs/model_format.md.
std::vector<std::uint8_t> serialize_model(const TrainedModel& model);
TrainedModel deserialize_model(std::span<const std::uint8_t> bytes);

// ---------------------------------------------------------------------------
// Per-kind entry points, exposed for tests and for direct use.

namespace detail {

/// Mean softmax cross-entropy of scores = x * W^T + b, with gradients.
double softmax_loss_grad(const Matrix& x, std::span<const int> y, const Matrix& w, std::span<const double> b,
                         Matrix* grad_w, std::vector<double>* grad_b);

LogisticModel fit_logistic(const Matrix& x, std::span<const int> y, int k, const HyperParams& params);
std::vector<int> predict_logistic(const LogisticModel& m, const Matrix& x);

KnnModel fit_knn(const Matrix& x, std::span<const int> y, const HyperParams& params);
std::vector<int> predict_knn(const KnnModel& m, int k, const Matrix& x);

struct DualResult {
  std::vector<double> alpha;
  double max_violation = 0.0;
  int epochs = 0;
  bool converged = false;
};
/// Box-constrained hinge dual: min 1/2 a'Qa - sum(a) with Q_ij = y_i y_j G_ij,
/// 0 <= a_i <= c, by coordinate ascent in seeded random order. `gram` is the
/// n x n kernel matrix including the +1 bias term.
DualResult solve_hinge_dual(const Matrix& gram, std::span<const double> sign, double c, double tol, int max_epochs,
                            Rng& rng);
SvmModel fit_svm(const Matrix& x, std::span<const int> y, int k, const HyperParams& params, std::uint64_t seed);
std::vector<int> predict_svm(const SvmModel& m, const Matrix& x);

/// Loss = mean cross-entropy + alpha/(2n) * (|W1|^2 + |W2|^2).
double mlp_loss_grad(const MlpModel& m, const Matrix& x, std::span<const int> y, double alpha, MlpModel* grad);
MlpModel fit_mlp(const Matrix& x, std::span<const int> y, int k, const HyperParams& params, std::uint64_t seed);
std::vector<int> predict_mlp(const MlpModel& m, const Matrix& x);

ForestModel fit_forest(const Matrix& x, std::span<const int> y, int k, const HyperParams& params, bool extra_trees,
                       std::uint64_t seed);
std::vector<int> predict_forest(const ForestModel& m, int k, const Matrix& x);

GbdtModel fit_gbdt(const Matrix& x, std::span<const int> y, int k, const HyperParams& params);
std::vector<int> predict_gbdt(const GbdtModel& m, int k, const Matrix& x);

/// Index of the largest score; ties go to the smallest index.
int argmax(std::span<const double> scores) noexcept;

}  // namespace detail

}  // namespace dfo
