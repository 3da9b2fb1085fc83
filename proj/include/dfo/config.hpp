#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "dfo/classifiers.hpp"
#include "dfo/dataset.hpp"
#include "dfo/feature_selection.hpp"
#include "dfo/tuning.hpp"

namespace dfo {

/// Parsed experiment configuration. Grammar (docs/config.md):
///
///   # comment            ; also "; comment"
///   [section]
///   key = value
///
/// Sections: [data] manifest, feature_set; [run] seed, output_dir;
/// [split] ratios; [experiment] classifiers, selectors, fractions, budget,
/// objective; [standardize] LR, KNN, SVM, MLP, RF, ET, GBDT, lasso.
struct ExperimentConfig {
  std::filesystem::path manifest;
  std::string feature_set;  // empty: derived from the manifest's backbone/stage
  std::uint64_t seed = 0;
  SplitRatios ratios = kDefaultRatios;
  std::vector<ClassifierKind> classifiers{kAllClassifierKinds.begin(), kAllClassifierKinds.end()};
  std::vector<SelectorMethod> selectors{SelectorMethod::kGbdt, SelectorMethod::kRf, SelectorMethod::kLasso};
  std::vector<double> fractions{0.5, 0.4, 0.3, 0.2, 0.1, 0.05};
  std::size_t budget = 30;
  TuningObjective objective = TuningObjective::kAccuracy;
  std::map<ClassifierKind, bool> standardize;
  bool standardize_lasso = true;
  std::filesystem::path output_dir;

  bool standardizes(ClassifierKind kind) const;
};

/// Relative paths resolve against base_dir. Throws ConfigError.
ExperimentConfig parse_config(std::string_view text, const std::filesystem::path& base_dir);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Comma-separated fraction list, each in (0, 1]. Throws ConfigError.
std::vector<double> parse_fraction_list(std::string_view csv);

/// Canonical text of every output-affecting field (the output directory is
/// excluded) and its 64-bit hash in hex.
std::string canonical_config(const ExperimentConfig& config);
std::string config_hash(const ExperimentConfig& config);

/// Incremental 64-bit hash used for config and stage hashes.
class StableHasher {
 public:
  StableHasher& add(std::string_view field);
  StableHasher& add(std::uint64_t value) { return add(std::to_string(value)); }
  std::uint64_t value() const noexcept { return state_; }
  std::string hex() const;

 private:
  std::uint64_t state_ = 0x6A09E667F3BCC909ULL;
};

}  // namespace dfo
