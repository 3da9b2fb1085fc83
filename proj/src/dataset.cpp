#include "dfo/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dfo/errors.hpp"
#include "dfo/random.hpp"

namespace dfo {

Matrix take_rows(const Matrix& m, std::span<const std::size_t> idx) {
  Matrix out(idx.size(), m.cols());
  for (std::size_t r = 0; r < idx.size(); ++r) {
    const auto src = m.row(idx[r]);
    std::copy(src.begin(), src.end(), out.row(r).begin());
  }
  return out;
}

std::vector<std::size_t> LabelVector::counts() const {
  std::vector<std::size_t> out(class_names.size(), 0);
  for (int label : labels) ++out.at(static_cast<std::size_t>(label));
  return out;
}

LabelVector take_labels(const LabelVector& y, std::span<const std::size_t> idx) {
  LabelVector out;
  out.class_names = y.class_names;
  out.labels.reserve(idx.size());
  for (auto i : idx) out.labels.push_back(y.labels[i]);
  return out;
}

std::array<std::size_t, 3> split_sizes(std::size_t m, const SplitRatios& ratios) {
  // The epsilon keeps products such as 25 * 0.64 from flooring to 15.
  const auto n_train = static_cast<std::size_t>(std::floor(static_cast<double>(m) * ratios[0] + 1e-9));
  const auto n_val = static_cast<std::size_t>(std::floor(static_cast<double>(m) * ratios[1] + 1e-9));
  return {n_train, n_val, m - n_train - n_val};
}

SplitIndices stratified_split(const LabelVector& labels, const SplitRatios& ratios, std::uint64_t seed) {
  for (double r : ratios) {
    if (!(r > 0.0)) throw ConfigError("split ratios must be positive");
  }
  if (std::abs(ratios[0] + ratios[1] + ratios[2] - 1.0) > 1e-9) {
    throw ConfigError("split ratios must sum to 1");
  }

  const auto k = static_cast<std::size_t>(labels.num_classes());
  std::vector<std::vector<std::size_t>> members(k);
  for (std::size_t i = 0; i < labels.labels.size(); ++i) {
    const int label = labels.labels[i];
    if (label < 0 || static_cast<std::size_t>(label) >= k) {
      throw DataError("label " + std::to_string(label) + " out of range at row " + std::to_string(i));
    }
    members[static_cast<std::size_t>(label)].push_back(i);
  }

  SplitIndices out;
  Rng rng(seed);
  for (std::size_t c = 0; c < k; ++c) {
    auto& idx = members[c];
    if (idx.size() < 3) {
      throw DataError("class '" + labels.class_names[c] + "' has " + std::to_string(idx.size()) +
                      " samples; at least 3 are required to split");
    }
    rng.shuffle(std::span(idx));
    const auto [n_train, n_val, n_test] = split_sizes(idx.size(), ratios);
    out.train.insert(out.train.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
    out.val.insert(out.val.end(), idx.begin() + static_cast<std::ptrdiff_t>(n_train),
                   idx.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
    out.test.insert(out.test.end(), idx.begin() + static_cast<std::ptrdiff_t>(n_train + n_val), idx.end());
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.val.begin(), out.val.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

Standardizer standardize_fit(const Matrix& x_train) {
  const std::size_t n = x_train.rows(), d = x_train.cols();
  Standardizer s;
  s.mean.assign(d, 0.0);
  s.scale.assign(d, 1.0);
  if (n == 0) return s;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) s.mean[j] += x_train(i, j);
  }
  for (auto& m : s.mean) m /= static_cast<double>(n);
  std::vector<double> var(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const double c = x_train(i, j) - s.mean[j];
      var[j] += c * c;
    }
  }
  for (std::size_t j = 0; j < d; ++j) {
    const double sd = std::sqrt(var[j] / static_cast<double>(n));
    s.scale[j] = sd < 1e-12 ? 1.0 : sd;
  }
  return s;
}

Matrix Standardizer::apply(const Matrix& x) const {
  Matrix out(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t j = 0; j < x.cols(); ++j) out(i, j) = (x(i, j) - mean[j]) / scale[j];
  }
  return out;
}

}  // namespace dfo
