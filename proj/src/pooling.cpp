#include "dfo/pooling.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace dfo {

namespace {

void require_finite(std::span<const double> values, const std::string& where) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw PoolingError(PoolingError::Kind::kNonFinite,
                         where + ": non-finite element at flat index " + std::to_string(i));
    }
  }
}

PooledFeature pool_or_pass(const Tensor& t, const std::string& where) {
  if (t.rank() == 1) {
    PooledFeature out{t.to_f64()};
    require_finite(out.vector, where);
    return out;
  }
  return global_average_pool(t);
}

}  // namespace

double pairwise_sum(std::span<const double> values) noexcept {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

PooledFeature global_average_pool(const Tensor& map) {
  if (map.rank() != 3) {
    throw PoolingError(PoolingError::Kind::kWrongRank,
                       "expected a [C,H,W] map, got rank " + std::to_string(map.rank()));
  }
  const auto& shape = map.shape();
  const std::size_t channels = shape[0], spatial = shape[1] * shape[2];
  if (channels == 0 || spatial == 0) {
    throw PoolingError(PoolingError::Kind::kZeroExtent, "feature map has a zero extent");
  }
  const auto values = map.to_f64();
  require_finite(values, "feature map");
  PooledFeature out;
  out.vector.resize(channels);
  for (std::size_t c = 0; c < channels; ++c) {
    out.vector[c] = pairwise_sum(std::span(values).subspan(c * spatial, spatial)) / static_cast<double>(spatial);
  }
  return out;
}

std::pair<FeatureMatrix, LabelVector> pool_dataset(const DatasetManifest& manifest, unsigned jobs) {
  const std::size_t n = manifest.entries.size();
  const std::size_t d = manifest.feature_dim;
  FeatureMatrix features{Matrix(n, d), {}};
  LabelVector labels{{}, manifest.class_names};
  for (const auto& e : manifest.entries) {
    features.sample_ids.push_back(e.sample_id);
    labels.labels.push_back(e.label);
  }

  // Each worker owns disjoint rows; the first error by row order wins.
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::size_t error_row = n;
  std::exception_ptr error;
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      const auto& entry = manifest.entries[i];
      try {
        const auto pooled = pool_or_pass(read_array_file(manifest.resolve(entry)), "sample '" + entry.sample_id + "'");
        if (pooled.vector.size() != d) {
          throw PoolingError(PoolingError::Kind::kDimensionMismatch,
                             "sample '" + entry.sample_id + "' pools to " + std::to_string(pooled.vector.size()) +
                                 " features, manifest feature_dim is " + std::to_string(d));
        }
        std::copy(pooled.vector.begin(), pooled.vector.end(), features.values.row(i).begin());
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (i < error_row) {
          error_row = i;
          error = std::current_exception();
        }
      }
    }
  };
  const unsigned workers = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(n)));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);
  return {std::move(features), std::move(labels)};
}

}  // namespace dfo
