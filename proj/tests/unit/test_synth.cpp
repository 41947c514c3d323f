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
#include <cstring>
#include <set>

#include "potp/core/session_io.hpp"
#include "potp/features/matrix_builder.hpp"
#include "potp/features/registry.hpp"
#include "potp/labeling/labeling.hpp"
#include "potp/numeric.hpp"
#include "potp/synth/cohort.hpp"

using namespace potp;
using namespace potp::synth;

namespace {

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && (a.empty() || std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0);
}

PhysioProfile flat_profile(double t_rel_mean, double t_rel_sd) {
  PhysioProfile p = scenario_profile(Scenario::Null);
  for (auto& [c, v] : p.by_class) v.t_rel_mean = t_rel_mean, v.t_rel_sd = t_rel_sd;
  return p;
}

}  // namespace

TEST(Synth, CohortIsBitIdenticalAcrossRunsAndThreads) {
  const auto a = generate_cohort(3, Scenario::PaperLike, 11, 1);
  const auto b = generate_cohort(3, Scenario::PaperLike, 11, 3);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(session_manifest(a[i]).dump(), session_manifest(b[i]).dump());
    ASSERT_EQ(a[i].channels.size(), 5u);
    for (const auto& [m, ch] : a[i].channels) EXPECT_TRUE(same_bits(ch.samples, b[i].channel(m)->samples));
  }
  const auto c = generate_cohort(1, Scenario::PaperLike, 12, 1);
  EXPECT_FALSE(same_bits(a[0].channel(Modality::ECG)->samples, c[0].channel(Modality::ECG)->samples));
}

TEST(Synth, EmptyCohortAndInvalidProfile) {
  EXPECT_TRUE(generate_cohort(0, Scenario::Null, 1).empty());
  PhysioProfile p = scenario_profile(Scenario::Null);
  p.by_class[SegmentClass::Emotional].insp_frac = 1.5;
  EXPECT_THROW(generate_session("S01", default_protocol(), p, 1), InvalidArgument);
  p = scenario_profile(Scenario::Null);
  p.by_class.erase(SegmentClass::Cognitive);
  EXPECT_THROW(generate_session("S01", default_protocol(), p, 1), InvalidArgument);
  EXPECT_THROW(scenario_from_string("paperlike"), InvalidArgument);
  EXPECT_EQ(scenario_from_string("null"), Scenario::Null);
}

TEST(Synth, ExactPerceptionGivesCorrectDurationOnGrid) {
  const auto [s, gt] = generate_session("S01", default_protocol(), flat_profile(0.0, 0.0), 5);
  for (const auto& seg : s.segments) {
    ASSERT_TRUE(seg.t_perceived.has_value());
    EXPECT_EQ(*seg.t_perceived, std::round(seg.t_correct() / 30.0) * 30.0);
    EXPECT_TRUE(is_valid_perceived(*seg.t_perceived));
    EXPECT_EQ(labeling::compute_t_rel(seg.t_correct(), *seg.t_perceived), 0.0);
  }
}

TEST(Synth, QuestionnaireQuantizationAndClipping) {
  // t_rel far below -100 asks for perceived durations beyond 300 s.
  const auto [s, gt] = generate_session("S01", default_protocol(), flat_profile(-400.0, 0.0), 5);
  for (const auto& seg : s.segments) EXPECT_EQ(*seg.t_perceived, 300.0);
  const auto [s2, gt2] = generate_session("S01", default_protocol(), flat_profile(0.0, 40.0), 6);
  for (const auto& seg : s2.segments) {
    EXPECT_TRUE(is_valid_perceived(*seg.t_perceived));
    const double ideal = seg.t_correct() * (1.0 - gt2.segment(seg.index).t_rel_planted / 100.0);
    EXPECT_EQ(*seg.t_perceived, std::clamp(std::round(ideal / 30.0) * 30.0, 0.0, 300.0));
    ASSERT_TRUE(seg.vass.has_value());
    EXPECT_GE(*seg.vass, 0);
    EXPECT_LE(*seg.vass, 100);
  }
}

TEST(Synth, EveryRegistryFeatureHasATruthStatus) {
  const auto status = feature_truth_status();
  const auto names = features::feature_names();
  EXPECT_EQ(status.size(), names.size());
  const ClassPhysiology probe;
  const std::set<std::string> known = {"free",         "rr_mean_s",          "rr_sdnn_s",        "lf_hf_ratio",
                                       "resp_rate_hz", "insp_frac",          "scl_level_us",     "scl_slope_us_per_s",
                                       "scr_rate_per_min", "skt_slope_c_per_s", "ppg_rise_frac", "ppg_reflect_frac"};
  for (const auto& n : names) {
    ASSERT_TRUE(status.count(n)) << n;
    EXPECT_TRUE(known.count(status.at(n))) << n << " -> " << status.at(n);
  }
  EXPECT_EQ(status.at("ECG_RR_mean"), "rr_mean_s");
}

TEST(Synth, GroundTruthMatchesSegments) {
  const auto [s, gt] = generate_session("S01", default_protocol(), scenario_profile(Scenario::Separable), 9);
  ASSERT_EQ(gt.segments.size(), s.segments.size());
  for (const auto& seg : s.segments) {
    EXPECT_EQ(gt.segment(seg.index).klass, seg.klass);
    EXPECT_EQ(gt.segment(seg.index).t_perceived, *seg.t_perceived);
  }
  EXPECT_THROW(gt.segment(42), InvalidArgument);
  ASSERT_GT(gt.r_peaks.size(), 100u);
  EXPECT_TRUE(std::is_sorted(gt.r_peaks.begin(), gt.r_peaks.end()));
  EXPECT_EQ(gt.scl_clean.size(), s.channel(Modality::EDA)->samples.size());
}

TEST(Synth, FeaturesRecoverPlantedRates) {
  PhysioProfile p = scenario_profile(Scenario::Null);
  for (auto& [c, v] : p.by_class) v.rr_mean_s = 0.8, v.resp_rate_hz = 0.25;
  const auto [s, gt] = generate_session("S01", default_protocol(), p, 3);
  const auto m = features::build_feature_matrix({s});
  const auto rr = *m.column_index("ECG_RR_mean");
  const auto rsp = *m.column_index("RSP_Rate_mean");
  std::vector<double> rr_v, rsp_v;
  for (const auto& row : m.rows) rr_v.push_back(row[rr]), rsp_v.push_back(row[rsp]);
  EXPECT_NEAR(mean(rr_v), 0.8, 0.01);
  // Respiration rate is reported per minute.
  EXPECT_NEAR(mean(rsp_v) / 60.0, 0.25, 0.25 * 0.05);
}

TEST(Synth, PaperLikeCohortReproducesGroupDirections) {
  const auto c = generate_cohort(18, Scenario::PaperLike, 7, 2);
  const auto rows = labeling::run_group_tests(labeling::time_errors(c));
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].direction, "Slower");
  EXPECT_EQ(rows[1].direction, "No change");
  EXPECT_EQ(rows[2].direction, "Faster");
  EXPECT_LT(rows[0].test.mean, 0.0);
  EXPECT_GT(rows[2].test.mean, 0.0);
}

TEST(Synth, PaperLikeThresholdsDoNotCross) {
  const auto c = generate_cohort(18, Scenario::PaperLike, 7, 2);
  std::vector<double> t;
  for (const auto& e : labeling::time_errors(c)) t.push_back(e.t_rel);
  const auto th = labeling::fit_potp_thresholds(t);
  EXPECT_LT(th.lower, th.upper);
}
