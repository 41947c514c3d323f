/*
 * Copyright 2026 The POTP Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "potp/explain/shapley.hpp"
#include "potp/ml/models/tree.hpp"
#include "potp/random.hpp"

using namespace potp;
using namespace potp::explain;

namespace {

ml::Matrix gaussian_rows(std::size_t n, std::size_t d, std::uint64_t seed) {
  Rng rng(seed);
  ml::Matrix m(n, d);
  for (double& v : m.data) v = rng.normal();
  return m;
}

// Exact Shapley values by enumerating coalitions, with the same
// background-averaged value function as the estimator.
std::vector<double> exact_shapley(const ScoreFn& f, std::span<const double> x, const ml::Matrix& bg, std::size_t k) {
  const std::size_t d = x.size();
  auto value = [&](unsigned mask) {
    double v = 0.0;
    for (std::size_t b = 0; b < bg.rows; ++b) {
      std::vector<double> z(bg.row(b).begin(), bg.row(b).end());
      for (std::size_t j = 0; j < d; ++j)
        if (mask & (1u << j)) z[j] = x[j];
      v += f(z)[k];
    }
    return v / static_cast<double>(bg.rows);
  };
  std::vector<double> fact(d + 1, 1.0);
  for (std::size_t i = 1; i <= d; ++i) fact[i] = fact[i - 1] * static_cast<double>(i);
  std::vector<double> phi(d, 0.0);
  for (unsigned mask = 0; mask < (1u << d); ++mask) {
    const auto s = static_cast<std::size_t>(__builtin_popcount(mask));
    for (std::size_t j = 0; j < d; ++j) {
      if (mask & (1u << j)) continue;
      const double w = fact[s] * fact[d - s - 1] / fact[d];
      phi[j] += w * (value(mask | (1u << j)) - value(mask));
    }
  }
  return phi;
}

}  // namespace

TEST(Shapley, AdditiveModelMatchesAnalyticValues) {
  ScoreFn f = [](std::span<const double> x) { return std::vector<double>{x[0] + x[1]}; };
  // Symmetric background with mean exactly 0.
  ml::Matrix bg(200, 2);
  const auto half = gaussian_rows(100, 2, 3);
  for (std::size_t i = 0; i < 100; ++i)
    for (std::size_t j = 0; j < 2; ++j) bg(i, j) = half(i, j), bg(i + 100, j) = -half(i, j);
  const auto rows = ml::Matrix::from_rows({{2.0, 3.0}});
  const auto a = shapley_attributions(f, rows, bg, 2000, 17);
  EXPECT_NEAR(a.value(0, 0, 0), 2.0, 0.1);
  EXPECT_NEAR(a.value(0, 1, 0), 3.0, 0.1);
  EXPECT_NEAR(a.baseline[0], 0.0, 1e-12);
  const auto rank = rank_features(a);
  EXPECT_EQ(rank[0].feature, "x2");
  EXPECT_EQ(rank[1].feature, "x1");
}

TEST(Shapley, MatchesExactEnumerationOnNonlinearModel) {
  ScoreFn f = [](std::span<const double> x) {
    return std::vector<double>{x[0] * x[1] + std::sin(x[2]), std::max(x[0], x[2]) - x[1] * x[1]};
  };
  const auto bg = gaussian_rows(5, 3, 4);
  const auto rows = ml::Matrix::from_rows({{1.0, -0.5, 2.0}});
  const auto a = shapley_attributions(f, rows, bg, 4000, 9);
  for (std::size_t k = 0; k < 2; ++k) {
    const auto exact = exact_shapley(f, rows.row(0), bg, k);
    for (std::size_t j = 0; j < 3; ++j)
      EXPECT_LE(std::abs(a.value(0, j, k) - exact[j]), 4.0 * a.error(0, j, k) + 1e-9) << j << "," << k;
  }
}

TEST(Shapley, UnusedTreeFeatureGetsZero) {
  // Label depends on x1 only; x2 is never split on.
  ml::Matrix X(200, 2);
  std::vector<int> y(200);
  Rng rng(5);
  for (std::size_t i = 0; i < 200; ++i) {
    X(i, 0) = rng.normal();
    X(i, 1) = rng.normal();
    y[i] = X(i, 0) > 0 ? 1 : 0;
  }
  ml::Dtc tree({{"max_depth", 1}});
  tree.fit(X, y, 2, 1);
  ScoreFn f = [&](std::span<const double> x) { return tree.predict_proba(x); };
  const auto rows = gaussian_rows(10, 2, 6);
  const auto a = shapley_attributions(f, rows, X, 500, 3);
  for (std::size_t r = 0; r < rows.rows; ++r)
    for (std::size_t k = 0; k < 2; ++k) EXPECT_NEAR(a.value(r, 1, k), 0.0, 0.05);
}

TEST(Shapley, BackgroundEqualToRowGivesZero) {
  ScoreFn f = [](std::span<const double> x) { return std::vector<double>{std::exp(x[0]) * x[1], x[2]}; };
  const auto rows = ml::Matrix::from_rows({{0.3, -1.0, 4.0}});
  const auto a = shapley_attributions(f, rows, rows, 50, 1);
  for (double v : a.phi) EXPECT_EQ(v, 0.0);
}

TEST(Shapley, LocalAccuracyWithinMonteCarloError) {
  ScoreFn f = [](std::span<const double> x) {
    const double s = 1.0 / (1.0 + std::exp(-(x[0] - 2.0 * x[1] + x[2] * x[3])));
    return std::vector<double>{1.0 - s, s};
  };
  const auto bg = gaussian_rows(100, 4, 7);
  const auto rows = gaussian_rows(50, 4, 8);
  const auto a = shapley_attributions(f, rows, bg, 2000, 2);
  for (std::size_t r = 0; r < 50; ++r)
    for (std::size_t k = 0; k < 2; ++k) {
      const double gap = a.sum(r, k) - (a.fx[r * 2 + k] - a.baseline[k]);
      EXPECT_LE(std::abs(gap), 3.0 * a.total_se[r * 2 + k] + 1e-12) << r;
    }
}

TEST(Shapley, DuplicatedColumnsShareCredit) {
  ScoreFn f = [](std::span<const double> x) { return std::vector<double>{std::tanh(x[0] + x[1]) + 0.5 * x[2]}; };
  auto bg = gaussian_rows(100, 3, 9);
  for (std::size_t i = 0; i < bg.rows; ++i) bg(i, 1) = bg(i, 0);
  const auto rows = ml::Matrix::from_rows({{1.5, 1.5, -1.0}, {-0.7, -0.7, 2.0}});
  const auto a = shapley_attributions(f, rows, bg, 3000, 4);
  for (std::size_t r = 0; r < 2; ++r) {
    const double se = std::hypot(a.error(r, 0, 0), a.error(r, 1, 0));
    EXPECT_LE(std::abs(a.value(r, 0, 0) - a.value(r, 1, 0)), 4.0 * se);
  }
}

TEST(Shapley, DeterministicAcrossThreads) {
  ScoreFn f = [](std::span<const double> x) { return std::vector<double>{x[0] * x[1], x[1] - x[0]}; };
  const auto bg = gaussian_rows(20, 2, 10);
  const auto rows = gaussian_rows(12, 2, 11);
  const auto a = shapley_attributions(f, rows, bg, 200, 5, 1);
  const auto b = shapley_attributions(f, rows, bg, 200, 5, 4);
  EXPECT_EQ(a.phi, b.phi);
  EXPECT_EQ(a.se, b.se);
  const auto c = shapley_attributions(f, rows, bg, 200, 6, 1);
  EXPECT_NE(a.phi, c.phi);
}

TEST(Shapley, InputErrors) {
  ScoreFn f = [](std::span<const double> x) { return std::vector<double>{x[0]}; };
  const auto bg = gaussian_rows(5, 2, 1);
  EXPECT_THROW(shapley_attributions(f, bg, bg, 0, 1), InvalidArgument);
  EXPECT_THROW(shapley_attributions(f, bg, ml::Matrix(0, 2), 10, 1), InvalidArgument);
  EXPECT_THROW(shapley_attributions(f, gaussian_rows(2, 3, 1), bg, 10, 1), InvalidArgument);
  EXPECT_THROW(shapley_attributions(f, bg, bg, 10, 1, 1, {"only_one"}), InvalidArgument);
}

TEST(Ranking, ZeroAttributionsKeepInputOrder) {
  ScoreFn f = [](std::span<const double>) { return std::vector<double>{1.0, 0.0}; };
  const auto bg = gaussian_rows(4, 4, 2);
  const auto a = shapley_attributions(f, bg, bg, 10, 1, 1, {"d", "b", "c", "a"}, {"no", "yes"});
  const auto rank = rank_features(a);
  ASSERT_EQ(rank.size(), 4u);
  EXPECT_EQ(rank[0].feature, "d");
  EXPECT_EQ(rank[3].feature, "a");
  const auto csv = ranking_csv(rank, a.class_names);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "rank,feature,mean_abs_phi,mean_abs_phi_no,mean_abs_phi_yes");
  const auto attr = attribution_csv(a);
  EXPECT_EQ(attr.substr(0, attr.find('\n')), "row_id,feature,class,phi");
  EXPECT_EQ(std::count(attr.begin(), attr.end(), '\n'), 1 + 4 * 4 * 2);
}

TEST(Shapley, BackgroundSampleIsSeededSubset) {
  const auto a = sample_background(500, 100, 3);
  EXPECT_EQ(a.size(), 100u);
  EXPECT_TRUE(std::is_sorted(a.begin(), a.end()));
  EXPECT_EQ(a, sample_background(500, 100, 3));
  EXPECT_NE(a, sample_background(500, 100, 4));
  EXPECT_EQ(sample_background(7, 100, 3).size(), 7u);
}
