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

// Acceptance checks: one PASS/FAIL line per criterion. Criterion 12 reruns
// criteria 2-11 with another thread count and compares every recorded number.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <string>
#include <vector>

#include "oracles/oracles.hpp"
#include "potp/dsp/ecg.hpp"
#include "potp/dsp/eda.hpp"
#include "potp/dsp/ppg.hpp"
#include "potp/dsp/resp.hpp"
#include "potp/explain/shapley.hpp"
#include "potp/features/matrix_builder.hpp"
#include "potp/labeling/labeling.hpp"
#include "potp/labeling/stats.hpp"
#include "potp/ml/cv.hpp"
#include "potp/ml/models/factory.hpp"
#include "potp/ml/models/logreg.hpp"
#include "potp/ml/pipeline.hpp"
#include "potp/ml/rfecv.hpp"
#include "potp/ml/split.hpp"
#include "potp/ml/tpe.hpp"
#include "potp/numeric.hpp"
#include "potp/spectral/psd.hpp"
#include "potp/synth/cohort.hpp"
#include "support/ml_data.hpp"

using namespace potp;

namespace {

constexpr std::uint64_t kSeed = 7;

struct Outcome {
  bool pass = true;
  std::string detail;
  std::vector<double> numbers;  // compared bit for bit across thread counts

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + std::string("failed: ") + what;
    }
  }
  void note(const std::string& s) { detail += (detail.empty() ? "" : "; ") + s; }
  void record(double v) { numbers.push_back(v); }
  void record(const std::vector<double>& v) { numbers.insert(numbers.end(), v.begin(), v.end()); }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// ---- 1 ---------------------------------------------------------------------

Outcome c1_t_rel(int) {
  Outcome o;
  o.check(labeling::compute_t_rel(180, 180) == 0.0, "(180,180) -> 0");
  o.check(labeling::compute_t_rel(180, 120) == 100.0 / 3.0, "(180,120) -> 33.33");
  o.check(labeling::compute_t_rel(120, 150) == -25.0, "(120,150) -> -25");
  Rng rng(kSeed, "t-rel-pairs");
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double c = rng.uniform(10.0, 400.0), p = rng.uniform(0.0, 600.0);
    const double ref = (1.0 - p / c) * 100.0;
    const double err = std::abs(labeling::compute_t_rel(c, p) - ref) / std::max(1.0, std::abs(ref));
    worst = std::max(worst, err);
  }
  o.check(worst <= 1e-13, "relative error <= 1e-13");
  o.note("3 worked examples exact; 1000 pairs, worst relative error " + fmt("%.2e", worst));
  return o;
}

// ---- 2 ---------------------------------------------------------------------

Outcome c2_thresholds(int) {
  Outcome o;
  Rng rng(kSeed, "threshold-population");
  std::vector<double> t;
  for (int i = 0; i < 200; ++i) t.push_back(rng.normal(-50.0, 30.0));
  for (int i = 0; i < 200; ++i) t.push_back(rng.normal(31.0, 25.0));
  const auto th = labeling::fit_potp_thresholds(t);
  o.record({th.upper, th.lower});
  o.check(std::abs(th.upper - 10.0) <= 3.0, "upper within 3 of +10");
  o.check(std::abs(th.lower + 19.0) <= 3.0, "lower within 3 of -19");
  o.note("upper " + fmt("%.2f", th.upper) + " (target 10), lower " + fmt("%.2f", th.lower) + " (target -19)");
  return o;
}

// ---- 3 ---------------------------------------------------------------------

Outcome c3_statistics(int threads) {
  Outcome o;
  double worst = 0.0;
  Rng rng(kSeed, "t-grid");
  for (int i = 0; i < 50; ++i) {
    const double df = 1.0 + std::floor(rng.uniform(0.0, 40.0));
    const double t = rng.uniform(-6.0, 6.0);
    const double ours = stats::student_t_sf(t, df);
    const double ref = oracle::t_upper_tail(t, df);
    worst = std::max(worst, std::abs(ours - ref));
    o.record(ours);
  }
  o.check(worst <= 1e-6, "t tail probabilities within 1e-6 of integration");
  const auto cohort = synth::generate_cohort(18, synth::Scenario::PaperLike, kSeed, threads);
  const auto rows = labeling::run_group_tests(labeling::time_errors(cohort));
  const std::vector<std::string> expected = {"Slower", "No change", "Faster"};
  std::string got;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    o.check(rows[i].direction == expected[i], labeling::to_string(rows[i].state) + " direction");
    got += (i ? "/" : "") + rows[i].direction;
    o.record({rows[i].test.mean, rows[i].test.p_value});
  }
  o.note("50 (t, df) pairs, worst |dp| " + fmt("%.1e", worst) + "; paper_like n=18 directions " + got);
  return o;
}

// ---- 4 ---------------------------------------------------------------------

// Nearest element of a sorted vector.
double nearest(const std::vector<double>& v, double x) {
  auto it = std::lower_bound(v.begin(), v.end(), x);
  if (it == v.end()) return v.back();
  if (it == v.begin()) return *it;
  return (x - *(it - 1) < *it - x) ? *(it - 1) : *it;
}

Outcome c4_dsp(int) {
  Outcome o;
  synth::PhysioProfile p = synth::scenario_profile(synth::Scenario::Separable);
  // Tonic slopes on every class and no phasic events, so the slope has a clean target.
  const std::map<SegmentClass, double> slope = {{SegmentClass::Rest, 0.01},
                                                {SegmentClass::Neutral, -0.01},
                                                {SegmentClass::Emotional, 0.015},
                                                {SegmentClass::Cognitive, 0.02}};
  for (auto& [c, v] : p.by_class) v.scl_slope_us_per_s = slope.at(c), v.scr_rate_per_min = 0.0;
  const auto [s, gt] = synth::generate_session("S01", default_protocol(), p, kSeed);
  const double end = s.segments.back().end_s + p.lead_s;

  // R peaks.
  const auto& ecg = *s.channel(Modality::ECG);
  const auto rr = dsp::detect_r_peaks(ecg);
  double worst_r = 0.0;
  std::size_t truth_n = 0;
  for (double t : gt.r_peaks) {
    if (t < 5.0 || t > end - 5.0) continue;
    ++truth_n;
    worst_r = std::max(worst_r, std::abs(nearest(rr.peak_times_s, t) - t));
  }
  std::size_t det_n = 0;
  for (double t : rr.peak_times_s) det_n += t >= 5.0 && t <= end - 5.0;
  o.check(worst_r <= 1.0 / ecg.fs + 1e-9, "R-peak timing within 1 sample");
  o.check(det_n == truth_n, "R-peak count");
  o.record(worst_r);

  // Respiration, per segment.
  const auto rc = dsp::detect_resp_cycles(*s.channel(Modality::RSP));
  double worst_rate = 0.0, worst_ie = 0.0;
  for (const auto& seg : s.segments) {
    std::vector<double> r_det, i_det, e_det, r_true, i_true, e_true;
    for (const auto& c : rc.cycles)
      if (c.onset_s >= seg.start_s && c.exp_end_s <= seg.end_s)
        r_det.push_back(c.rate_bpm()), i_det.push_back(c.insp_time()), e_det.push_back(c.exp_time());
    for (const auto& b : gt.breaths)
      if (b.onset_s >= seg.start_s && b.exp_end_s <= seg.end_s)
        r_true.push_back(60.0 / (b.exp_end_s - b.onset_s)), i_true.push_back(b.insp_end_s - b.onset_s),
            e_true.push_back(b.exp_end_s - b.insp_end_s);
    if (r_det.empty() || r_true.empty()) {
      o.check(false, "breaths found in segment " + std::to_string(seg.index));
      continue;
    }
    worst_rate = std::max(worst_rate, std::abs(mean(r_det) / mean(r_true) - 1.0));
    worst_ie = std::max({worst_ie, std::abs(mean(i_det) / mean(i_true) - 1.0), std::abs(mean(e_det) / mean(e_true) - 1.0)});
  }
  o.check(worst_rate <= 0.05, "respiration rate within 5%");
  o.check(worst_ie <= 0.10, "InspTime/ExpTime within 10%");
  o.record({worst_rate, worst_ie});

  // Tonic slope away from the level steps at segment boundaries. The margin is
  // where the tonic filter's impulse response falls below 1% of its peak.
  const auto eda_ch = *s.channel(Modality::EDA);
  const auto eda = dsp::decompose_eda(eda_ch);
  double settle_s = 0.0;
  {
    SignalChannel impulse{Modality::EDA, eda_ch.fs, std::vector<double>(eda_ch.samples.size(), 0.0), 0.0};
    const std::size_t mid = impulse.samples.size() / 2;
    impulse.samples[mid] = 1.0;
    const auto h = dsp::decompose_eda(impulse).scl;
    double peak = 0.0;
    for (double v : h) peak = std::max(peak, std::abs(v));
    for (std::size_t i = mid; i < h.size(); ++i)
      if (std::abs(h[i]) > 0.01 * peak) settle_s = static_cast<double>(i - mid) / eda_ch.fs;
  }
  double worst_slope = 0.0, worst_recon = 0.0;
  std::size_t slope_segments = 0;
  for (const auto& seg : s.segments) {
    if (seg.end_s - seg.start_s < 2.0 * settle_s + 10.0) continue;
    ++slope_segments;
    const auto scl = eda.scl_channel().slice(seg.start_s + settle_s, seg.end_s - settle_s);
    const double est = ls_slope_uniform(scl, 1.0 / eda.fs);
    worst_slope = std::max(worst_slope, std::abs(est / slope.at(seg.klass) - 1.0));
  }
  for (std::size_t i = 0; i < eda.filtered.size(); ++i)
    worst_recon = std::max(worst_recon, std::abs(eda.filtered[i] - eda.scl[i] - eda.scr[i]));
  o.check(slope_segments == s.segments.size(), "every segment long enough for a slope estimate");
  o.check(worst_slope <= 0.05, "SCL slope within 5%");
  o.check(worst_recon <= 1e-9, "EDA reconstruction within 1e-9");
  o.record({worst_slope, worst_recon});

  // Pulse periods.
  const auto& ppg_ch = *s.channel(Modality::PPG);
  const auto pp = dsp::delineate_ppg(ppg_ch);
  std::vector<double> feet;
  for (const auto& b : gt.pulses) feet.push_back(b.foot_s);
  double worst_pp = 0.0;
  std::size_t matched = 0;
  for (const auto& q : pp.pulses) {
    if (q.foot_s < 5.0 || q.next_foot_s > end - 5.0) continue;
    const auto it = std::lower_bound(feet.begin(), feet.end(), nearest(feet, q.foot_s));
    const std::size_t k = static_cast<std::size_t>(it - feet.begin());
    if (k + 1 >= feet.size()) continue;
    ++matched;
    worst_pp = std::max(worst_pp, std::abs(q.pp() - (feet[k + 1] - feet[k])));
  }
  o.check(matched > 0.9 * static_cast<double>(truth_n), "most pulses delineated");
  o.check(worst_pp <= 1.0 / ppg_ch.fs + 1e-9, "PPG PP within 1 sample");
  o.record(worst_pp);

  o.note("R-peak max error " + fmt("%.2f", worst_r * ecg.fs) + " samples over " + std::to_string(truth_n) +
         " beats; RSP rate " + fmt("%.1f%%", 100 * worst_rate) + "; Insp/Exp " + fmt("%.1f%%", 100 * worst_ie) +
         "; SCL slope " + fmt("%.1f%%", 100 * worst_slope) +
         " (" + fmt("%.0f s", settle_s) + " edge margin)" + "; PP " + fmt("%.2f", worst_pp * ppg_ch.fs) +
         " samples over " + std::to_string(matched) + " pulses; EDA recon " + fmt("%.1e", worst_recon));
  return o;
}

// ---- 5 ---------------------------------------------------------------------

Outcome c5_spectral(int threads) {
  Outcome o;
  Rng rng(kSeed, "spectral");
  std::vector<double> x(4 * 600);
  for (auto& v : x) v = rng.normal();
  const double var = variance(x);
  const auto psd = spectral::welch_psd(x, 4.0, 30.0);
  const double ratio = spectral::total_power(psd) / var;
  o.check(std::abs(ratio - 1.0) <= 0.10, "Parseval within 10%");
  o.record(ratio);

  double worst_scale = 0.0;
  for (double a : {-3.0, 0.01, 250.0}) {
    auto y = x;
    for (auto& v : y) v *= a;
    const auto scaled = spectral::welch_psd(y, 4.0, 30.0);
    for (std::size_t k = 0; k < psd.power.size(); ++k)
      if (psd.power[k] > 0)
        worst_scale = std::max(worst_scale, std::abs(scaled.power[k] / (a * a * psd.power[k]) - 1.0));
  }
  o.check(worst_scale <= 1e-9, "Welch scale equivariance 1e-9");
  o.record(worst_scale);

  const auto grid = spectral::frequency_grid(0.05, 1.0, 0.005);
  double worst_lomb = 0.0;
  for (int k = 0; k < 20; ++k) {
    const double f0 = rng.uniform(0.1, 0.8);
    std::vector<double> t, y;
    for (double now = 0.0; now < 90.0; now += rng.uniform(0.15, 0.35)) {
      t.push_back(now);
      y.push_back(std::sin(2 * std::numbers::pi * f0 * now + 0.7 * k) + rng.normal(0, 0.2));
    }
    worst_lomb = std::max(worst_lomb, std::abs(spectral::peak_frequency(spectral::lomb_psd(t, y, grid), 0.05, 1.0) - f0));
  }
  o.check(worst_lomb <= 0.005 + 1e-12, "Lomb peak within one grid step");
  o.record(worst_lomb);

  const auto sessions = synth::generate_cohort(2, synth::Scenario::PaperLike, kSeed, threads);
  const auto m = features::build_feature_matrix(sessions, {.threads = threads});
  const auto a = *m.column_index("ECG_RR_nVLF"), b = *m.column_index("ECG_RR_nLF"), c = *m.column_index("ECG_RR_nHF");
  double worst_sum = 0.0;
  for (const auto& r : m.rows) worst_sum = std::max(worst_sum, std::abs(r[a] + r[b] + r[c] - 1.0));
  o.check(worst_sum <= 1e-6, "normalized bands sum to 1");
  o.record(worst_sum);
  o.note("Parseval ratio " + fmt("%.3f", ratio) + "; scale error " + fmt("%.1e", worst_scale) + "; Lomb error " +
         fmt("%.4f", worst_lomb) + " Hz over 20 signals; band sum error " + fmt("%.1e", worst_sum) + " over " +
         std::to_string(m.n_rows()) + " windows");
  return o;
}

// ---- 6 ---------------------------------------------------------------------

Outcome c6_split(int) {
  Outcome o;
  Rng rng(kSeed, "split-sizes");
  std::size_t violations = 0;
  for (int i = 0; i < 1000; ++i) {
    const std::size_t n = 5 + rng.index(46);
    std::vector<std::string> ids;
    for (std::size_t s = 0; s < n; ++s) ids.push_back(synth::subject_name(s));
    const auto plan = ml::make_split_plan(ids, derive_seed(kSeed, "plan", static_cast<std::uint64_t>(i)));
    const std::set<std::string> test(plan.test_subjects.begin(), plan.test_subjects.end());
    for (const auto& f : plan.folds) {
      const std::set<std::string> val(f.validation_subjects.begin(), f.validation_subjects.end());
      for (const auto& t : f.training_subjects) violations += test.contains(t) + val.contains(t);
      for (const auto& v : f.validation_subjects) violations += test.contains(v);
    }
    for (const auto& t : plan.train_subjects) violations += test.contains(t);
    o.record(static_cast<double>(plan.test_subjects.size()));
  }
  o.check(violations == 0, "no subject leakage");
  std::vector<std::string> ids;
  for (int s = 0; s < 18; ++s) ids.push_back(synth::subject_name(static_cast<std::size_t>(s)));
  auto bad = ml::make_split_plan(ids, kSeed);
  bad.folds[3].training_subjects.push_back(bad.test_subjects.front());
  bool fired = false;
  try {
    ml::validate_plan(bad);
  } catch (const LeakageError&) {
    fired = true;
  }
  o.check(fired, "leakage assertion fires on a corrupted plan");
  o.note("1000 plans (5-50 subjects), " + std::to_string(violations) + " violations; corrupted plan " +
         (fired ? "rejected" : "accepted"));
  return o;
}

// ---- 7 ---------------------------------------------------------------------

Outcome c7_models(int) {
  Outcome o;
  const auto train = testdata::blobs(60, {{0, 0, 0, 0}, {4, 0, 4, 0}, {0, 4, 0, 4}}, {1, 1, 1, 1}, kSeed);
  const auto test = testdata::blobs(200, {{0, 0, 0, 0}, {4, 0, 4, 0}, {0, 4, 0, 4}}, {1, 1, 1, 1}, kSeed + 1);
  double worst_f1 = 1.0;
  std::string lowest;
  for (auto a : ml::kAllAlgorithms) {
    auto m = ml::make_classifier(a);
    m->fit(train.X, train.y, 3, kSeed);
    const double f1 = ml::evaluate(test.y, m->predict(test.X), 3).weighted_f1;
    o.record(f1);
    o.check(f1 >= 0.95, ml::to_string(a) + " F1 >= 0.95");
    if (f1 < worst_f1) worst_f1 = f1, lowest = ml::to_string(a);
  }

  const double D = std::sqrt(4.0 + 1.0);
  const double bayes = 1.0 - oracle::normal_cdf(-D / 2.0);
  const auto g_train = testdata::blobs(2000, {{0, 0}, {2, 2}}, {1, 2}, kSeed + 2);
  const auto g_test = testdata::blobs(10000, {{0, 0}, {2, 2}}, {1, 2}, kSeed + 3);
  auto gnb = ml::make_classifier(ml::Algorithm::GNB);
  gnb->fit(g_train.X, g_train.y, 2, 0);
  const double acc = ml::evaluate(g_test.y, gnb->predict(g_test.X), 2).accuracy;
  o.check(std::abs(acc - bayes) <= 0.02, "GNB within 2% of the Bayes rate");
  o.record(acc);

  Rng rng(kSeed, "gradient-check");
  const int K = 3;
  const std::size_t size = K * (train.X.cols + 1);
  double worst_grad = 0.0;
  for (int point = 0; point < 50; ++point) {
    std::vector<double> theta(size), grad;
    for (double& t : theta) t = rng.normal(0, 1.5);
    const double lambda = std::exp(rng.uniform(std::log(1e-4), std::log(10.0)));
    ml::LogReg::loss_and_gradient(train.X, train.y, K, lambda, theta, &grad);
    double num = 0, den = 0;
    for (std::size_t i = 0; i < size; ++i) {
      const double h = 1e-6;
      auto tp = theta, tm = theta;
      tp[i] += h;
      tm[i] -= h;
      const double fd = (ml::LogReg::loss_and_gradient(train.X, train.y, K, lambda, tp, nullptr) -
                         ml::LogReg::loss_and_gradient(train.X, train.y, K, lambda, tm, nullptr)) /
                        (2 * h);
      num += (fd - grad[i]) * (fd - grad[i]);
      den += grad[i] * grad[i];
    }
    worst_grad = std::max(worst_grad, std::sqrt(num / den));
  }
  o.check(worst_grad <= 1e-5, "LogReg gradient check");
  o.record(worst_grad);

  ml::Matrix scaled = train.X;
  const std::vector<double> factor = {3.0, 0.01, 250.0, 1.7};
  for (std::size_t i = 0; i < scaled.rows; ++i)
    for (std::size_t j = 0; j < scaled.cols; ++j) scaled(i, j) *= factor[j];
  ml::Matrix scaled_test = test.X;
  for (std::size_t i = 0; i < scaled_test.rows; ++i)
    for (std::size_t j = 0; j < scaled_test.cols; ++j) scaled_test(i, j) *= factor[j];
  for (auto a : {ml::Algorithm::RF, ml::Algorithm::XGB}) {
    auto m1 = ml::make_classifier(a), m2 = ml::make_classifier(a);
    m1->fit(train.X, train.y, 3, kSeed);
    m2->fit(scaled, train.y, 3, kSeed);
    o.check(m1->predict(test.X) == m2->predict(scaled_test), ml::to_string(a) + " scale invariance");
  }
  o.note("lowest held-out F1 " + fmt("%.3f", worst_f1) + " (" + lowest + "); GNB accuracy " + fmt("%.4f", acc) +
         " vs Bayes " + fmt("%.4f", bayes) + "; gradient error " + fmt("%.1e", worst_grad) +
         "; RF/XGB predictions unchanged under scaling");
  return o;
}

// ---- 8 ---------------------------------------------------------------------

Outcome c8_tpe(int threads) {
  Outcome o;
  const ml::SearchSpace space = {{"x", ml::ParamKind::Float, 0.0, 1.0, {}}};
  const auto r = ml::tpe_optimize(space, [](const ml::Hyperparams& hp) { return -std::pow(hp.at("x") - 0.3, 2); },
                                  kSeed, {.budget = 50});
  const double err = std::abs(r.best.at("x") - 0.3);
  o.check(err <= 0.05, "best point within 0.05");
  o.check(r.best_score >= r.startup_mean, "benchmark best >= start-up mean");
  o.record({r.best.at("x"), r.best_score, r.startup_mean});

  // The same comparison on a cross-validated objective.
  const auto d = testdata::grouped(14, 20, 4, 2, kSeed, [](auto x, Rng& rng) {
    return x[0] - x[1] + 0.5 * x[2] * x[3] + rng.normal(0, 0.5) > 0 ? 1 : 0;
  });
  const auto plan = ml::make_split_plan(d.subjects(), kSeed);
  const auto cv = ml::prepare_cv(d.subset(d.rows_of(plan.train_subjects)), plan);
  const auto t = ml::tpe_optimize(
      ml::search_space(ml::Algorithm::KNN),
      [&](const ml::Hyperparams& hp) { return ml::cross_validate(ml::Algorithm::KNN, hp, cv, threads).mean; }, kSeed,
      {.budget = 30});
  o.check(t.best_score >= t.startup_mean, "CV best >= start-up mean");
  o.record({t.best_score, t.startup_mean});
  o.note("x* error " + fmt("%.4f", err) + " in 50 trials; KNN CV score " + fmt("%.3f", t.best_score) +
         " vs start-up mean " + fmt("%.3f", t.startup_mean));
  return o;
}

// ---- 9 ---------------------------------------------------------------------

Outcome c9_rfecv(int threads) {
  Outcome o;
  const auto d = testdata::grouped(14, 20, 13, 2, kSeed, [](auto x, Rng& rng) {
    return x[0] + x[1] + x[2] + rng.normal(0, 0.3) > 0 ? 1 : 0;
  });
  const auto plan = ml::make_split_plan(d.subjects(), kSeed);
  const auto train = d.subset(d.rows_of(plan.train_subjects));
  const auto cv = ml::prepare_cv(train, plan);
  const auto scaler = ml::fit_scaler(train.X, train.feature_names);
  const auto r = ml::rfecv(ml::Algorithm::LogReg, {}, cv, ml::apply_scaler(train.X, scaler), train.y, threads);
  std::size_t informative = 0, noise_kept = 0;
  for (auto f : r.selected) (f < 3 ? informative : noise_kept) += 1;
  o.check(informative == 3, "all informative features kept");
  o.check(noise_kept <= 3, "at least 7 noise features removed");
  o.record(r.mean_scores);
  o.note("kept " + std::to_string(informative) + "/3 informative, removed " + std::to_string(10 - noise_kept) +
         "/10 noise");
  return o;
}

// ---- 10 --------------------------------------------------------------------

Outcome c10_end_to_end(int threads) {
  Outcome o;
  for (auto sc : {synth::Scenario::Separable, synth::Scenario::Null}) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto sessions = synth::generate_cohort(18, sc, kSeed, threads);
    const auto m = features::build_feature_matrix(sessions, {.threads = threads});
    ml::PipelineOptions opt;
    opt.seed = kSeed;
    opt.threads = threads;
    const auto run = ml::run_full(m, labeling::time_errors(sessions), ml::Task::State3, opt);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const double f1 = run.result.test_report.weighted_f1;
    o.record(f1);
    o.record(run.result.test_report.cv_mean);
    o.check(secs < 600.0, synth::to_string(sc) + " run under 10 min");
    if (sc == synth::Scenario::Separable) o.check(f1 >= 0.9, "separable F1 >= 0.9");
    else o.check(f1 >= 0.2 && f1 <= 0.55, "null F1 within [0.2, 0.55]");
    o.note(synth::to_string(sc) + ": test weighted F1 " + fmt("%.3f", f1) + " with " +
           ml::to_string(run.result.artifact.algorithm) + " in " + fmt("%.0f s", secs));
  }
  return o;
}

// ---- 11 --------------------------------------------------------------------

Outcome c11_explain(int threads) {
  Outcome o;
  Rng rng(kSeed, "shapley-data");
  ml::Matrix bg(200, 2);
  for (std::size_t i = 0; i < 100; ++i)
    for (std::size_t j = 0; j < 2; ++j) bg(i, j) = rng.normal(), bg(i + 100, j) = -bg(i, j);
  explain::ScoreFn additive = [](std::span<const double> x) { return std::vector<double>{x[0] + x[1]}; };
  const auto a = explain::shapley_attributions(additive, ml::Matrix::from_rows({{2.0, 3.0}}), bg, 2000, kSeed, threads);
  const double e1 = std::abs(a.value(0, 0, 0) - 2.0), e2 = std::abs(a.value(0, 1, 0) - 3.0);
  o.check(e1 <= 0.1 && e2 <= 0.1, "additive model within 0.1");
  o.record(a.phi);

  explain::ScoreFn logistic = [](std::span<const double> x) {
    const double s = 1.0 / (1.0 + std::exp(-(x[0] - 2.0 * x[1] + x[2] * x[3])));
    return std::vector<double>{1.0 - s, s};
  };
  ml::Matrix bg4(100, 4), rows(50, 4);
  for (double& v : bg4.data) v = rng.normal();
  for (double& v : rows.data) v = rng.normal();
  const auto la = explain::shapley_attributions(logistic, rows, bg4, 2000, kSeed, threads);
  std::size_t bad = 0;
  for (std::size_t r = 0; r < 50; ++r)
    for (std::size_t k = 0; k < 2; ++k)
      bad += std::abs(la.sum(r, k) - (la.fx[r * 2 + k] - la.baseline[k])) > 3.0 * la.total_se[r * 2 + k] + 1e-12;
  o.check(bad == 0, "local accuracy within 3 SE on 50 rows");
  o.record(la.phi);

  // A tree that never splits on the second feature.
  ml::Matrix X(300, 2);
  std::vector<int> y;
  for (std::size_t i = 0; i < 300; ++i) {
    X(i, 0) = rng.normal(), X(i, 1) = rng.normal();
    y.push_back(X(i, 0) > 0.3 ? 1 : 0);
  }
  auto tree = ml::make_classifier(ml::Algorithm::DTC, {{"max_depth", 2}});
  tree->fit(X, y, 2, kSeed);
  explain::ScoreFn tf = [&](std::span<const double> x) { return tree->predict_proba(x); };
  const auto na = explain::shapley_attributions(tf, X.select_rows(std::vector<std::size_t>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9}),
                                                X, 1000, kSeed, threads);
  double worst_null = 0.0;
  for (std::size_t r = 0; r < 10; ++r)
    for (std::size_t k = 0; k < 2; ++k) worst_null = std::max(worst_null, std::abs(na.value(r, 1, k)));
  o.check(worst_null <= 0.05, "null feature within 0.05 of 0");
  o.record(na.phi);
  o.note("additive phi (" + fmt("%.3f", a.value(0, 0, 0)) + ", " + fmt("%.3f", a.value(0, 1, 0)) +
         "); local accuracy misses " + std::to_string(bad) + "/100; null feature max |phi| " + fmt("%.4f", worst_null));
  return o;
}

struct Criterion {
  int id;
  const char* name;
  double budget_s;  // <= 0: no runtime bound
  std::function<Outcome(int)> run;
};

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && (a.empty() || std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0);
}

}  // namespace

int main() {
  warnings_enabled() = false;
  const std::vector<Criterion> criteria = {
      {1, "t_rel definition", 1.0, c1_t_rel},
      {2, "threshold derivation", 1.0, c2_thresholds},
      {3, "statistics oracle", 5.0, c3_statistics},
      {4, "DSP oracles", 30.0, c4_dsp},
      {5, "spectral properties", 0.0, c5_spectral},
      {6, "split hygiene", 0.0, c6_split},
      {7, "model sanity", 0.0, c7_models},
      {8, "TPE", 0.0, c8_tpe},
      {9, "RFECV", 0.0, c9_rfecv},
      {10, "end-to-end", 0.0, c10_end_to_end},
      {11, "explainability", 0.0, c11_explain},
  };
  int failures = 0;
  std::vector<std::vector<double>> first(criteria.size());
  auto run_one = [](const Criterion& c, int threads, double& secs) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run(threads);
    } catch (const std::exception& e) {
      o.check(false, std::string("exception: ") + e.what());
    }
    secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.budget_s > 0 && secs >= c.budget_s) o.check(false, "runtime " + fmt("%.2f s", secs));
    return o;
  };
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    double secs = 0;
    const Outcome o = run_one(criteria[i], 1, secs);
    first[i] = o.numbers;
    failures += !o.pass;
    std::printf("criterion %2d %s [%7.2f s] %s: %s\n", criteria[i].id, o.pass ? "PASS" : "FAIL", secs,
                criteria[i].name, o.detail.c_str());
    std::fflush(stdout);
  }

  constexpr int kOtherThreads = 4;
  std::string diff;
  std::size_t compared = 0;
  const auto t0 = std::chrono::steady_clock::now();
  for (std::size_t i = 1; i < criteria.size(); ++i) {
    double secs = 0;
    const Outcome o = run_one(criteria[i], kOtherThreads, secs);
    compared += o.numbers.size();
    if (!same_bits(o.numbers, first[i])) diff += (diff.empty() ? "" : ",") + std::to_string(criteria[i].id);
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool det = diff.empty();
  failures += !det;
  std::printf("criterion 12 %s [%7.2f s] determinism: criteria 2-11 rerun with %d threads, %zu numbers %s\n",
              det ? "PASS" : "FAIL", secs, kOtherThreads, compared,
              det ? "identical" : ("differ in criteria " + diff).c_str());
  std::printf("%d of 12 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
