#pragma once

// Seeded synthetic datasets shared by the unit and acceptance tests.

#include <numeric>
#include <string>

#include "dfo/dataset.hpp"
#include "dfo/random.hpp"

namespace dfo::testing {

struct Dataset {
  Matrix x;
  LabelVector y;
};

/// `per_class` rows per class; class c is N(separation * e_c, I) in d
/// dimensions (needs d >= k). Rows are shuffled with the same seed.
inline Dataset gaussian_blobs(std::size_t per_class, std::size_t d, int k, double separation, std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t n = per_class * static_cast<std::size_t>(k);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng.shuffle(std::span<std::size_t>(order));
  Dataset out{Matrix(n, d), {}};
  out.y.labels.resize(n);
  for (int c = 0; c < k; ++c) out.y.class_names.push_back("class" + std::to_string(c));
  for (std::size_t i = 0; i < n; ++i) {
    const int c = static_cast<int>(order[i] / per_class);
    out.y.labels[i] = c;
    for (std::size_t j = 0; j < d; ++j) out.x(i, j) = rng.normal() + (j == static_cast<std::size_t>(c) ? separation : 0.0);
  }
  return out;
}

/// Binary labels with feature `signal` equal to the label and every other
/// feature pure noise.
inline Dataset injected_signal(std::size_t n, std::size_t d, std::size_t signal, std::uint64_t seed) {
  Rng rng(seed);
  Dataset out{Matrix(n, d), {}};
  out.y.class_names = {"neg", "pos"};
  out.y.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int label = static_cast<int>(i % 2);
    out.y.labels[i] = label;
    for (std::size_t j = 0; j < d; ++j) out.x(i, j) = j == signal ? static_cast<double>(label) : rng.normal();
  }
  return out;
}

inline double accuracy(const std::vector<int>& pred, const std::vector<int>& truth) {
  std::size_t hit = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) hit += pred[i] == truth[i];
  return static_cast<double>(hit) / static_cast<double>(pred.size());
}

}  // namespace dfo::testing
