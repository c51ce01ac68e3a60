#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "metrics.hpp"
#include "rng.hpp"

namespace sigpath {

namespace {

// O(n^2) comparison-counting oracle with half credit for ties
double pairwise_auroc(const std::vector<int>& y, const std::vector<double>& s) {
  double wins = 0.0;
  std::size_t pos = 0, neg = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] == 0) continue;
    ++pos;
    for (std::size_t j = 0; j < y.size(); ++j) {
      if (y[j] != 0) continue;
      if (s[i] > s[j]) wins += 1.0;
      if (s[i] == s[j]) wins += 0.5;
    }
  }
  for (int l : y) neg += l == 0;
  if (pos == 0 || neg == 0) return 0.5;
  return wins / (static_cast<double>(pos) * static_cast<double>(neg));
}

}  // namespace

TEST_CASE("balanced_accuracy") {
  CHECK(balanced_accuracy({0, 1, 2}, {0, 1, 2}) == 1.0);
  CHECK(balanced_accuracy({0, 0, 1, 1}, {0, 0, 0, 0}) == 0.5);
  // per-class recalls 1/2 and 2/3
  CHECK(balanced_accuracy({0, 0, 1, 1, 1}, {0, 1, 1, 1, 0}) ==
        doctest::Approx((0.5 + 2.0 / 3.0) / 2.0));
  // absent classes are excluded from the mean
  CHECK(balanced_accuracy({0, 0, 2}, {0, 0, 2}) == 1.0);
  CHECK_THROWS_AS(balanced_accuracy({}, {}), std::invalid_argument);
}

TEST_CASE("accuracy") {
  CHECK(accuracy({0, 1, 1}, {0, 1, 0}) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("auroc_binary: separation, ties, degenerate classes") {
  CHECK(auroc_binary({0, 0, 1, 1}, {0.1, 0.2, 0.8, 0.9}) == 1.0);
  CHECK(auroc_binary({0, 1, 0, 1}, {0.5, 0.5, 0.5, 0.5}) == 0.5);
  CHECK(auroc_binary({1, 1, 1}, {0.1, 0.5, 0.9}) == 0.5);  // no negatives
  CHECK(auroc_binary({0, 0}, {0.1, 0.9}) == 0.5);          // no positives
  CHECK(auroc_binary({1, 0, 1, 0}, {0.9, 0.8, 0.7, 0.6}) == doctest::Approx(0.75));
}

TEST_CASE("auroc_binary equals the pairwise oracle on random inputs") {
  Rng rng(404);
  for (int rep = 0; rep < 100; ++rep) {
    std::size_t n = 2 + rng.below(12);
    std::vector<int> y(n);
    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = static_cast<int>(rng.below(2));
      s[i] = static_cast<double>(rng.below(6)) / 5.0;  // coarse scores force ties
    }
    CHECK(std::abs(auroc_binary(y, s) - pairwise_auroc(y, s)) < 1e-12);
  }
}

TEST_CASE("weighted_auroc: hand-built three-class case") {
  // 6 instances, supports 3/2/1
  std::vector<int> y = {0, 0, 0, 1, 1, 2};
  std::vector<std::vector<double>> scores = {
      {0.7, 0.2, 0.1}, {0.5, 0.3, 0.2}, {0.3, 0.4, 0.3},
      {0.2, 0.6, 0.2}, {0.4, 0.5, 0.1}, {0.1, 0.2, 0.7},
  };
  double expect = 0.0;
  for (int c = 0; c < 3; ++c) {
    std::vector<int> onevs(6);
    std::vector<double> col(6);
    std::size_t support = 0;
    for (std::size_t i = 0; i < 6; ++i) {
      onevs[i] = y[i] == c;
      support += onevs[i];
      col[i] = scores[i][c];
    }
    expect += pairwise_auroc(onevs, col) * static_cast<double>(support) / 6.0;
  }
  CHECK(weighted_auroc(y, scores) == doctest::Approx(expect).epsilon(1e-12));

  // perfectly separating scores
  std::vector<std::vector<double>> perfect = {
      {1, 0, 0}, {1, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 1, 0}, {0, 0, 1},
  };
  CHECK(weighted_auroc(y, perfect) == doctest::Approx(1.0).epsilon(1e-12));

  // label-independent scores
  std::vector<std::vector<double>> flat(6, {0.3, 0.3, 0.3});
  CHECK(weighted_auroc(y, flat) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("average_precision") {
  CHECK(average_precision({0, 0, 1, 1}, {0.1, 0.2, 0.8, 0.9}) == 1.0);
  // a single positive ranked last of four
  CHECK(average_precision({1, 0, 0, 0}, {0.1, 0.4, 0.3, 0.2}) == doctest::Approx(0.25));
  // all-equal scores collapse to the prevalence
  CHECK(average_precision({1, 0, 0, 1}, {0.5, 0.5, 0.5, 0.5}) == doctest::Approx(0.5));
  CHECK(average_precision({1, 0, 0, 0, 0}, {0.5, 0.5, 0.5, 0.5, 0.5}) == doctest::Approx(0.2));
  CHECK_THROWS_AS(average_precision({0, 0}, {0.1, 0.2}), std::invalid_argument);
}

TEST_CASE("weighted_average_precision reduces to AP per one-vs-rest block") {
  std::vector<int> y = {0, 1, 1, 0};
  std::vector<std::vector<double>> scores = {
      {0.9, 0.1}, {0.2, 0.8}, {0.4, 0.6}, {0.7, 0.3}};
  std::vector<int> y0 = {1, 0, 0, 1}, y1 = {0, 1, 1, 0};
  std::vector<double> c0 = {0.9, 0.2, 0.4, 0.7}, c1 = {0.1, 0.8, 0.6, 0.3};
  double expect = 0.5 * average_precision(y0, c0) + 0.5 * average_precision(y1, c1);
  CHECK(weighted_average_precision(y, scores) == doctest::Approx(expect).epsilon(1e-12));
}

}  // namespace sigpath
