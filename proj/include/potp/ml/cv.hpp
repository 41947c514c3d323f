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

#ifndef POTP_ML_CV_HPP_
#define POTP_ML_CV_HPP_

#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "potp/error.hpp"
#include "potp/ml/dataset.hpp"
#include "potp/ml/metrics.hpp"
#include "potp/ml/models/factory.hpp"
#include "potp/ml/scaler.hpp"
#include "potp/ml/split.hpp"
#include "potp/numeric.hpp"
#include "potp/parallel.hpp"
#include "potp/random.hpp"

namespace potp::ml {

/// One scaled fold. The scaler is refitted on the fold's training subjects
/// and keeps every column, so folds share the column layout of the input.
struct FoldData {
  std::size_t index = 0;  // position in the split plan; drives the fit seed
  Matrix X_train;
  std::vector<int> y_train;
  Matrix X_val;
  std::vector<int> y_val;
};

struct CvData {
  std::vector<FoldData> folds;
  int n_classes = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> feature_names;

  CvData select_features(std::span<const std::size_t> cols) const {
    CvData out;
    out.n_classes = n_classes;
    out.seed = seed;
    for (auto c : cols) out.feature_names.push_back(feature_names[c]);
    for (const auto& f : folds)
      out.folds.push_back({f.index, f.X_train.select_cols(cols), f.y_train, f.X_val.select_cols(cols), f.y_val});
    return out;
  }
};

inline std::uint64_t fold_seed(std::uint64_t master, std::size_t fold) { return derive_seed(master, "fit", fold); }

namespace detail {

inline bool has_two_classes(const std::vector<int>& y) {
  return std::set<int>(y.begin(), y.end()).size() >= 2;
}

/// Scales one training/validation partition of `d`. Returns false when the
/// partition cannot be scored (no validation rows or a single training class).
inline bool make_fold(const Dataset& d, const std::vector<std::string>& train_subjects,
                      const std::vector<std::string>& val_subjects, std::size_t index, FoldData& out) {
  const auto tr = d.rows_of(train_subjects), va = d.rows_of(val_subjects);
  assert_no_leakage(d, tr, va, "fold " + std::to_string(index));
  out.index = index;
  out.y_train.clear();
  out.y_val.clear();
  for (auto r : tr) out.y_train.push_back(d.y[r]);
  for (auto r : va) out.y_val.push_back(d.y[r]);
  if (va.empty() || !has_two_classes(out.y_train)) return false;
  const Matrix Xtr = d.X.select_rows(tr);
  const auto stats = fit_scaler(Xtr, d.feature_names, {.drop = false, .warn = false});
  out.X_train = apply_scaler(Xtr, stats);
  out.X_val = apply_scaler(d.X.select_rows(va), stats);
  return true;
}

}  // namespace detail

/// Builds the scaled folds of `plan` over the rows of `d` (the training
/// subjects; test subjects must not appear in `d`).
inline CvData prepare_cv(const Dataset& d, const SplitPlan& plan) {
  validate_plan(plan);
  const std::set<std::string> test(plan.test_subjects.begin(), plan.test_subjects.end());
  for (const auto& g : d.groups)
    if (test.contains(g)) throw LeakageError("test subject " + g + " present in cross-validation data");
  CvData cv;
  cv.n_classes = d.n_classes();
  cv.seed = plan.seed;
  cv.feature_names = d.feature_names;
  for (std::size_t f = 0; f < plan.folds.size(); ++f) {
    FoldData fd;
    if (detail::make_fold(d, plan.folds[f].training_subjects, plan.folds[f].validation_subjects, f, fd))
      cv.folds.push_back(std::move(fd));
    else
      warn("fold " + std::to_string(f) + " skipped: no validation rows or a single training class");
  }
  if (cv.folds.empty()) throw InvalidArgument("no usable cross-validation folds");
  return cv;
}

struct CvResult {
  std::vector<double> val_scores;
  std::vector<double> train_scores;
  double mean = 0.0;
  double std = 0.0;
  double train_mean = 0.0;

  double gap() const { return train_mean - mean; }
};

inline CvResult summarize(std::vector<double> val, std::vector<double> train) {
  CvResult r;
  const auto v = mean_std(val);
  r.mean = v.mean;
  r.std = v.std;
  r.train_mean = mean_std(train).mean;
  r.val_scores = std::move(val);
  r.train_scores = std::move(train);
  return r;
}

/// Fold score: positive-class F-1 (binary) or weighted F-1 on the
/// validation subjects. Fold f is fitted with seed derived from (plan seed, f).
inline CvResult cross_validate(Algorithm a, const Hyperparams& hp, const CvData& cv, int threads = 1) {
  std::vector<double> val(cv.folds.size()), train(cv.folds.size());
  parallel_for(cv.folds.size(), threads, [&](std::size_t i) {
    const auto& f = cv.folds[i];
    auto m = make_classifier(a, hp);
    m->fit(f.X_train, f.y_train, cv.n_classes, fold_seed(cv.seed, f.index));
    val[i] = task_score(f.y_val, m->predict(f.X_val), cv.n_classes);
    train[i] = task_score(f.y_train, m->predict(f.X_train), cv.n_classes);
  });
  return summarize(std::move(val), std::move(train));
}

struct CurvePoint {
  double fraction = 1.0;
  double train_mean = 0.0;
  double val_mean = 0.0;
  std::size_t folds_used = 0;
};

/// For each fraction, every fold trains on that share of its training
/// subjects (seeded draw; all of them at 1.0) and is scored on its full
/// validation subjects.
inline std::vector<CurvePoint> learning_curve(Algorithm a, const Hyperparams& hp, const Dataset& d,
                                              const SplitPlan& plan, const std::vector<double>& fractions,
                                              int threads = 1) {
  validate_plan(plan);
  std::vector<CurvePoint> out;
  for (std::size_t fi = 0; fi < fractions.size(); ++fi) {
    const double frac = fractions[fi];
    if (!(frac > 0.0 && frac <= 1.0)) throw InvalidArgument("learning-curve fraction must lie in (0, 1]");
    std::vector<double> val(plan.folds.size(), kNaN), train(plan.folds.size(), kNaN);
    parallel_for(plan.folds.size(), threads, [&](std::size_t f) {
      auto subjects = plan.folds[f].training_subjects;
      const auto n = std::max<std::size_t>(
          1, static_cast<std::size_t>(std::lround(frac * static_cast<double>(subjects.size()))));
      if (n < subjects.size()) {
        Rng rng(plan.seed, "learning-curve", fi * 1000 + f);
        rng.shuffle(subjects);
        subjects.resize(n);
        std::sort(subjects.begin(), subjects.end());
      }
      FoldData fd;
      if (!detail::make_fold(d, subjects, plan.folds[f].validation_subjects, f, fd)) return;
      auto m = make_classifier(a, hp);
      m->fit(fd.X_train, fd.y_train, d.n_classes(), fold_seed(plan.seed, f));
      val[f] = task_score(fd.y_val, m->predict(fd.X_val), d.n_classes());
      train[f] = task_score(fd.y_train, m->predict(fd.X_train), d.n_classes());
    });
    CurvePoint p;
    p.fraction = frac;
    std::vector<double> v, t;
    for (std::size_t f = 0; f < val.size(); ++f)
      if (!std::isnan(val[f])) v.push_back(val[f]), t.push_back(train[f]);
    p.folds_used = v.size();
    p.val_mean = v.empty() ? kNaN : mean_std(v).mean;
    p.train_mean = t.empty() ? kNaN : mean_std(t).mean;
    out.push_back(p);
  }
  return out;
}

inline constexpr double kSelectionDelta = 0.02;

struct SelectionEntry {
  Algorithm algorithm;
  CvResult cv;
};

struct SelectionReport {
  std::vector<SelectionEntry> entries;  // in family order
  Algorithm chosen = Algorithm::LogReg;
  std::vector<Algorithm> contenders;    // within delta of the best mean
};

/// Ranks families (default hyperparameters) by mean CV score. Among those
/// within kSelectionDelta of the best, the largest train - validation gap at
/// full data wins; remaining ties follow family order.
inline SelectionReport select_from(std::vector<SelectionEntry> entries) {
  SelectionReport r;
  double best = -1.0;
  for (const auto& e : entries) best = std::max(best, e.cv.mean);
  double best_gap = -INFINITY;
  for (const auto& e : entries) {
    if (e.cv.mean < best - kSelectionDelta) continue;
    r.contenders.push_back(e.algorithm);
    if (e.cv.gap() > best_gap) {
      best_gap = e.cv.gap();
      r.chosen = e.algorithm;
    }
  }
  r.entries = std::move(entries);
  return r;
}

inline SelectionReport select_model(const CvData& cv, int threads = 1,
                                    const std::vector<Algorithm>& families = {kAllAlgorithms.begin(),
                                                                              kAllAlgorithms.end()}) {
  std::vector<SelectionEntry> entries;
  for (auto a : families) entries.push_back({a, cross_validate(a, {}, cv, threads)});
  return select_from(std::move(entries));
}

}  // namespace potp::ml

#endif  // POTP_ML_CV_HPP_
