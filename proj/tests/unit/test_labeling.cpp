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

#include <cmath>

#include "oracles/oracles.hpp"
#include "potp/labeling/labeling.hpp"
#include "potp/labeling/stats.hpp"
#include "potp/random.hpp"

using namespace potp;
using namespace potp::labeling;

TEST(TRel, WorkedExamples) {
  EXPECT_EQ(compute_t_rel(180, 180), 0.0);
  EXPECT_EQ(compute_t_rel(180, 120), 100.0 * 60.0 / 180.0);
  EXPECT_NEAR(compute_t_rel(180, 120), 33.3333333333, 1e-9);
  EXPECT_EQ(compute_t_rel(120, 150), -25.0);
  EXPECT_THROW(compute_t_rel(0, 30), InvalidArgument);
  EXPECT_THROW(compute_t_rel(-5, 30), InvalidArgument);
}

TEST(TRel, Antisymmetry) {
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    // Whole seconds keep c + d exact, so the identity holds bit for bit.
    const double c = std::floor(rng.uniform(1, 600)), d = std::floor(rng.uniform(0, 300));
    EXPECT_DOUBLE_EQ(compute_t_rel(c, c + d), -100.0 * d / c);
  }
}

TEST(Grouping, ProtocolClasses) {
  EXPECT_EQ(group_state(5), StateLabel::Cognitive);
  EXPECT_EQ(group_state(7), StateLabel::Cognitive);
  EXPECT_EQ(group_state(2), StateLabel::Neutral);
  EXPECT_EQ(group_state(3), StateLabel::Neutral);
  EXPECT_EQ(group_state(4), StateLabel::Emotional);
  EXPECT_EQ(group_state(8), StateLabel::Emotional);
  for (int i : {1, 6, 9}) EXPECT_EQ(group_state(i), StateLabel::Excluded);
  EXPECT_EQ(group_state(9, {true}), StateLabel::Neutral);
  EXPECT_EQ(group_state(1, {true}), StateLabel::Excluded);
  EXPECT_THROW(group_state(10), InvalidArgument);
}

TEST(TTest, ThreeSampleExample) {
  const std::vector<double> x{1, 2, 3};
  const auto r = stats::one_tailed_t_test(x, stats::Tail::Greater);
  EXPECT_NEAR(r.t_stat, 3.4641016151, 1e-9);
  EXPECT_NEAR(r.p_value, oracle::t_upper_tail(r.t_stat, 2), 1e-8);
  EXPECT_NEAR(r.p_value, 0.0371, 5e-5);
}

TEST(TTest, SymmetricSampleGivesOneHalf) {
  const std::vector<double> x{-1, 1};
  EXPECT_DOUBLE_EQ(stats::one_tailed_t_test(x, stats::Tail::Greater).p_value, 0.5);
  EXPECT_DOUBLE_EQ(stats::one_tailed_t_test(x, stats::Tail::Less).p_value, 0.5);
}

TEST(TTest, DegenerateInputsAreErrors) {
  const std::vector<double> one{3}, flat{2, 2, 2};
  EXPECT_THROW(stats::one_tailed_t_test(one, stats::Tail::Less), InvalidArgument);
  EXPECT_THROW(stats::one_tailed_t_test(flat, stats::Tail::Less), InvalidArgument);
}

TEST(TDistribution, MatchesIntegrationOracleOnGrid) {
  for (double df : {1.0, 2.0, 3.0, 5.0, 17.0, 35.0, 100.0})
    for (double t : {-4.0, -1.5, -0.2, 0.0, 0.7, 2.0, 3.4641, 6.0}) {
      const double p = stats::student_t_sf(t, df);
      EXPECT_NEAR(p, oracle::t_upper_tail(t, df), 1e-8) << t << " " << df;
      EXPECT_GE(p, 0.0);
      EXPECT_LE(p, 1.0);
    }
}

TEST(GroupTests, PlantedMeansGiveExpectedDirections) {
  Rng rng(2024);
  std::vector<TimeError> errors;
  // 18 subjects x 2 segments per class = 36 values per class.
  for (int s = 0; s < 18; ++s) {
    const std::string id = "S" + std::to_string(s);
    for (int seg : {4, 8}) errors.push_back({id, seg, rng.normal(-20, 10)});
    for (int seg : {2, 3}) errors.push_back({id, seg, rng.normal(0, 10)});
    for (int seg : {5, 7}) errors.push_back({id, seg, rng.normal(25, 10)});
    errors.push_back({id, 1, 1000.0});  // excluded, must not affect any class
  }
  const auto rows = run_group_tests(errors);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].direction, "Slower");
  EXPECT_LT(rows[0].test.p_value, 0.01);
  EXPECT_EQ(rows[1].direction, "No change");
  EXPECT_EQ(rows[2].direction, "Faster");
  EXPECT_LT(rows[2].test.p_value, 0.01);
  for (const auto& r : rows) EXPECT_EQ(r.test.n, 36u);
  const auto csv = group_tests_csv(rows);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "class,n,mean_t_rel,sd_t_rel,t_stat,p_value,tail,passage_of_time");
}

TEST(GroupTests, SingleElementClassIsAnError) {
  std::vector<TimeError> e{{"a", 4, -5}, {"a", 2, 1}, {"b", 2, 3}, {"a", 5, 10}, {"b", 5, 12}};
  EXPECT_THROW(run_group_tests(e), InvalidArgument);
}

TEST(Thresholds, MatchDirectMomentComputation) {
  Rng rng(77, "thresholds", 0);
  std::vector<double> x;
  for (int i = 0; i < 200; ++i) x.push_back(rng.normal(-50, 30));
  for (int i = 0; i < 200; ++i) x.push_back(rng.normal(31, 25));
  x.push_back(0.0);  // belongs to neither side
  const auto th = fit_potp_thresholds(x);
  double sp = 0, sn = 0, np = 0, nn = 0;
  for (double v : x) {
    if (v > 0) sp += v, ++np;
    if (v < 0) sn += v, ++nn;
  }
  const double mp = sp / np, mn = sn / nn;
  double vp = 0, vn = 0;
  for (double v : x) {
    if (v > 0) vp += (v - mp) * (v - mp);
    if (v < 0) vn += (v - mn) * (v - mn);
  }
  EXPECT_NEAR(th.upper, mn + 2 * std::sqrt(vn / nn), 1e-9);
  EXPECT_NEAR(th.lower, mp - 2 * std::sqrt(vp / np), 1e-9);
}

TEST(Thresholds, AddingTheMeanFollowsTheMomentUpdate) {
  Rng rng(9);
  std::vector<double> x;
  for (int i = 0; i < 50; ++i) x.push_back(rng.uniform(-100, -1));
  for (int i = 0; i < 50; ++i) x.push_back(rng.uniform(1, 80));
  const auto th = fit_potp_thresholds(x);
  x.push_back(th.mu_neg);
  const auto th2 = fit_potp_thresholds(x);
  EXPECT_NEAR(th2.mu_neg, th.mu_neg, 1e-9);
  EXPECT_NEAR(th2.upper, th.mu_neg + 2 * th.sigma_neg * std::sqrt(50.0 / 51.0), 1e-9);
  EXPECT_LE(th2.upper, th.upper + 1e-12);
}

TEST(Thresholds, InsufficientOrCrossedIsAnError) {
  const std::vector<double> all_pos{1, 2, 3, 4, 5};
  EXPECT_THROW(fit_potp_thresholds(all_pos), InvalidArgument);
  const std::vector<double> two_neg{-1, -2, 3, 4, 5};
  EXPECT_THROW(fit_potp_thresholds(two_neg), InvalidArgument);
  // Tight clusters away from zero: upper = -11 + 1.63 lies below lower = 11 - 1.63.
  const std::vector<double> crossed{-10, -11, -12, 10, 11, 12};
  EXPECT_THROW(fit_potp_thresholds(crossed), InvalidArgument);
}

TEST(Labels, StrictThresholds) {
  const PotpThresholds th{10, -19, 0, 0, 0, 0};
  EXPECT_EQ(potp_label(15, th), PotpLabel::Faster);
  EXPECT_EQ(potp_label(-19, th), PotpLabel::Unlabeled);
  EXPECT_EQ(potp_label(10, th), PotpLabel::Unlabeled);
  EXPECT_EQ(potp_label(-30, th), PotpLabel::Slower);
}

TEST(Labels, EveryWindowGetsExactlyOneLabelFromItsSegment) {
  FeatureMatrix m;
  m.columns = {"f"};
  Rng rng(3);
  std::vector<TimeError> errors;
  for (int s = 0; s < 4; ++s)
    for (int seg = 1; seg <= 9; ++seg) {
      errors.push_back({"S" + std::to_string(s), seg, rng.uniform(-60, 60)});
      for (int w = 0; w < 2; ++w) {
        m.keys.push_back({"S" + std::to_string(s), seg, w});
        m.rows.push_back({rng.normal()});
      }
    }
  const PotpThresholds th{10, -19, 0, 0, 0, 0};
  const auto ds = assign_labels(m, errors, th);
  ASSERT_EQ(ds.potp.size(), m.n_rows());
  const auto counts = ds.potp_counts();
  EXPECT_EQ(counts.at(PotpLabel::Faster) + counts.at(PotpLabel::Slower) + counts.at(PotpLabel::Unlabeled),
            m.n_rows());
  for (std::size_t i = 0; i < m.n_rows(); i += 2) {
    EXPECT_EQ(ds.potp[i], ds.potp[i + 1]);
    EXPECT_EQ(ds.t_rel[i], ds.t_rel[i + 1]);
  }
  m.keys.push_back({"S9", 1, 0});
  m.rows.push_back({0.0});
  EXPECT_THROW(assign_labels(m, errors, th), InvalidArgument);
}

TEST(Correlation, LinearAndIndependent) {
  std::vector<double> x, y;
  for (int i = 0; i < 20; ++i) {
    x.push_back(i);
    y.push_back(2 * i + 1);
  }
  auto r = stats::pearson_corr_test(x, y);
  EXPECT_NEAR(r.r, 1.0, 1e-12);
  EXPECT_LT(r.p_value, 1e-12);

  Rng rng(100);
  x.clear();
  y.clear();
  for (int i = 0; i < 100; ++i) {
    x.push_back(rng.normal());
    y.push_back(rng.normal());
  }
  r = stats::pearson_corr_test(x, y);
  EXPECT_LT(std::abs(r.r), 0.2);
  EXPECT_GT(r.p_value, 0.05);

  const std::vector<double> c(10, 1.0);
  EXPECT_THROW(stats::pearson_corr_test(c, std::vector<double>(x.begin(), x.begin() + 10)), InvalidArgument);
}

TEST(Histogram, CountsSumToInput) {
  const std::vector<double> x{-45, -30, -29, 0, 5, 12, 33};
  const PotpThresholds th{10, -19, 20, 10, -35, 8};
  const auto csv = threshold_histogram_csv(x, th);
  std::size_t total = 0, pos = csv.find('\n') + 1;
  while (pos < csv.size()) {
    const auto a = csv.find(',', pos), b = csv.find(',', a + 1);
    total += std::stoul(csv.substr(a + 1, b - a - 1));
    pos = csv.find('\n', pos) + 1;
  }
  EXPECT_EQ(total, x.size());
}
