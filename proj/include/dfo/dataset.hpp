#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dfo/matrix.hpp"

namespace dfo {

/// Pooled embeddings, one row per sample, with ids aligned to rows.
struct FeatureMatrix {
  Matrix values;
  std::vector<std::string> sample_ids;
};

struct LabelVector {
  std::vector<int> labels;
  std::vector<std::string> class_names;

  std::size_t size() const noexcept { return labels.size(); }
  int num_classes() const noexcept { return static_cast<int>(class_names.size()); }
  /// Per-class counts, length num_classes().
  std::vector<std::size_t> counts() const;
};

LabelVector take_labels(const LabelVector& y, std::span<const std::size_t> idx);

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> val;
  std::vector<std::size_t> test;

  bool operator==(const SplitIndices&) const = default;
};

using SplitRatios = std::array<double, 3>;
inline constexpr SplitRatios kDefaultRatios{0.64, 0.16, 0.20};

/// Per class of size m: train gets floor(m*r0), val floor(m*r1), test the
/// rest. Members are assigned from a seeded permutation of the class's
/// indices (classes processed in index order, one Rng stream for all).
/// Each output list is sorted ascending.
/// Throws DataError for a class with fewer than 3 samples and ConfigError for
/// ratios that are not positive or do not sum to 1 within 1e-9.
SplitIndices stratified_split(const LabelVector& labels, const SplitRatios& ratios, std::uint64_t seed);

/// Per-class sizes the split rule produces for a class of m samples.
std::array<std::size_t, 3> split_sizes(std::size_t m, const SplitRatios& ratios);

/// Column z-scoring fitted on training rows only.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> scale;  // 1.0 for columns whose stdev < 1e-12

  Matrix apply(const Matrix& x) const;
};

Standardizer standardize_fit(const Matrix& x_train);
inline Matrix standardize_apply(const Standardizer& s, const Matrix& x) { return s.apply(x); }

}  // namespace dfo
