#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "dfo/classifiers.hpp"
#include "dfo/dataset.hpp"
#include "dfo/hyperparams.hpp"
#include "dfo/random.hpp"

namespace dfo {

struct Distribution {
  enum class Type { kUniform, kLogUniform, kIntRange, kCategorical };
  Type type = Type::kUniform;
  double lo = 0.0;
  double hi = 1.0;
  std::int64_t step = 1;               // kIntRange: values lo, lo+step, ..., <= hi
  std::vector<ParamValue> choices;     // kCategorical

  static Distribution uniform(double lo, double hi);
  static Distribution log_uniform(double lo, double hi);
  static Distribution int_range(std::int64_t lo, std::int64_t hi, std::int64_t step = 1);
  static Distribution categorical(std::vector<ParamValue> choices);

  /// Each draw consumes exactly one Rng output.
  ParamValue sample(Rng& rng) const;
};

/// Parameters are sampled in declaration order.
struct SearchSpace {
  std::vector<std::pair<std::string, Distribution>> params;

  void validate() const;
  HyperParams sample(Rng& rng) const;
};

SearchSpace default_search_space(ClassifierKind kind);

enum class TuningObjective { kAccuracy, kMacroF1 };

struct TrialRecord {
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  HyperParams params;
  double val_score = 0.0;
  double fit_seconds = 0.0;
  std::string error;  // set when fit threw; the score is then 0
};

struct SearchResult {
  HyperParams best_params;
  std::size_t best_trial = 0;
  std::vector<TrialRecord> trials;

  const TrialRecord& best() const { return trials[best_trial]; }
};

/// The `budget` parameter points and per-trial seeds are drawn up front from
/// `seed`, so the evaluated points do not depend on `jobs` or on scheduling.
/// best = argmax validation score, ties to the earliest trial.
SearchResult random_search(ClassifierKind kind, const SearchSpace& space, std::size_t budget, const Matrix& x_train,
                           const LabelVector& y_train, const Matrix& x_val, const LabelVector& y_val,
                           std::uint64_t seed, TuningObjective objective = TuningObjective::kAccuracy,
                           unsigned jobs = 1);

/// "trial,seed,params_json,val_score,status". Timings are left out so the
/// file is a pure function of its inputs.
std::string trials_to_csv(const std::vector<TrialRecord>& trials);

}  // namespace dfo
