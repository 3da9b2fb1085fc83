#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "dfo/dataset.hpp"
#include "dfo/errors.hpp"
#include "dfo/random.hpp"

using dfo::LabelVector;
using dfo::Matrix;

namespace {

LabelVector make_labels(const std::vector<std::size_t>& counts, std::uint64_t seed) {
  LabelVector y;
  for (std::size_t c = 0; c < counts.size(); ++c) {
    y.class_names.push_back("c" + std::to_string(c));
    y.labels.insert(y.labels.end(), counts[c], static_cast<int>(c));
  }
  dfo::Rng rng(seed);
  rng.shuffle(std::span<int>(y.labels));
  return y;
}

}  // namespace

TEST_CASE("split sizes on the published class counts") {
  std::size_t train = 0, val = 0, test = 0;
  for (std::size_t m : {1764, 1320, 1306}) {
    const auto s = dfo::split_sizes(m, dfo::kDefaultRatios);
    train += s[0];
    val += s[1];
    test += s[2];
  }
  CHECK(train == 2807);
  CHECK(val == 701);
  CHECK(test == 882);
  CHECK(train + val + test == 4390);
}

TEST_CASE("split sizes use floor, floor, remainder") {
  CHECK(dfo::split_sizes(10, dfo::kDefaultRatios) == std::array<std::size_t, 3>{6, 1, 3});
  CHECK(dfo::split_sizes(25, dfo::kDefaultRatios) == std::array<std::size_t, 3>{16, 4, 5});
  CHECK(dfo::split_sizes(3, dfo::kDefaultRatios) == std::array<std::size_t, 3>{1, 0, 2});
  for (std::size_t m = 3; m < 500; ++m) {
    const auto s = dfo::split_sizes(m, dfo::kDefaultRatios);
    CHECK(s[0] + s[1] + s[2] == m);
    CHECK(s[0] == static_cast<std::size_t>(std::floor(m * 0.64 + 1e-9)));
  }
}

TEST_CASE("stratified split partitions every index and preserves class sizes") {
  const auto y = make_labels({120, 90, 90}, 4);
  const auto s = dfo::stratified_split(y, dfo::kDefaultRatios, 42);
  std::set<std::size_t> seen;
  for (const auto* part : {&s.train, &s.val, &s.test}) {
    CHECK(std::is_sorted(part->begin(), part->end()));
    for (auto i : *part) CHECK(seen.insert(i).second);
  }
  CHECK(seen.size() == y.size());
  const auto tc = dfo::take_labels(y, s.train).counts();
  for (int c = 0; c < 3; ++c) {
    const auto expect = dfo::split_sizes(y.counts()[c], dfo::kDefaultRatios);
    CHECK(tc[c] == expect[0]);
    CHECK(dfo::take_labels(y, s.val).counts()[c] == expect[1]);
    CHECK(dfo::take_labels(y, s.test).counts()[c] == expect[2]);
  }
}

TEST_CASE("stratified split is a pure function of labels, ratios and seed") {
  const auto y = make_labels({50, 40, 30}, 1);
  CHECK(dfo::stratified_split(y, dfo::kDefaultRatios, 7) == dfo::stratified_split(y, dfo::kDefaultRatios, 7));
  CHECK(!(dfo::stratified_split(y, dfo::kDefaultRatios, 7) == dfo::stratified_split(y, dfo::kDefaultRatios, 8)));
}

TEST_CASE("stratified split errors") {
  const auto tiny = make_labels({10, 2}, 1);
  CHECK_THROWS_AS(dfo::stratified_split(tiny, dfo::kDefaultRatios, 1), dfo::DataError);
  const auto y = make_labels({10, 10}, 1);
  CHECK_THROWS_AS(dfo::stratified_split(y, {0.5, 0.5, 0.5}, 1), dfo::ConfigError);
  CHECK_THROWS_AS(dfo::stratified_split(y, {1.0, 0.0, 0.0}, 1), dfo::ConfigError);
}

TEST_CASE("standardizer fits on training rows only") {
  Matrix x(4, 3);
  const double data[4][3] = {{1, 5, 2}, {3, 5, 4}, {5, 5, 6}, {7, 5, 8}};
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 3; ++c) x(r, c) = data[r][c];
  const auto s = dfo::standardize_fit(x);
  CHECK(s.mean == std::vector<double>{4, 5, 5});
  CHECK(s.scale[0] == doctest::Approx(std::sqrt(5.0)));
  CHECK(s.scale[1] == 1.0);  // constant column: centered only
  const auto z = s.apply(x);
  double sum = 0, sq = 0;
  for (int r = 0; r < 4; ++r) {
    sum += z(r, 0);
    sq += z(r, 0) * z(r, 0);
    CHECK(z(r, 1) == 0.0);
  }
  CHECK(sum == doctest::Approx(0.0));
  CHECK(sq / 4 == doctest::Approx(1.0));

  Matrix other(1, 3, 4.0);
  CHECK(s.apply(other)(0, 0) == 0.0);
}
