#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dfo/dataset.hpp"
#include "dfo/errors.hpp"
#include "dfo/tensor_io.hpp"

namespace dfo {

struct PooledFeature {
  std::vector<double> vector;
};

class PoolingError : public DataError {
 public:
  enum class Kind { kWrongRank, kZeroExtent, kNonFinite, kDimensionMismatch };

  PoolingError(Kind kind, const std::string& detail) : DataError(detail), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

/// Pairwise (tree) summation; blocks of up to 8 are summed left to right.
double pairwise_sum(std::span<const double> values) noexcept;

/// Mean over the spatial grid of each channel of a [C,H,W] map.
PooledFeature global_average_pool(const Tensor& map);

/// Loads every manifest entry, pools [C,H,W] maps and passes [C] vectors
/// through. Row i is entries[i] regardless of `jobs`.
std::pair<FeatureMatrix, LabelVector> pool_dataset(const DatasetManifest& manifest, unsigned jobs = 1);

}  // namespace dfo
