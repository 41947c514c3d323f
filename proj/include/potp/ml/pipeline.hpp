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

#ifndef POTP_ML_PIPELINE_HPP_
#define POTP_ML_PIPELINE_HPP_

#include <cmath>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "potp/core/feature_matrix.hpp"
#include "potp/labeling/labeling.hpp"
#include "potp/ml/artifact.hpp"
#include "potp/ml/cv.hpp"
#include "potp/ml/dataset.hpp"
#include "potp/ml/rfecv.hpp"
#include "potp/ml/scaler.hpp"
#include "potp/ml/split.hpp"
#include "potp/ml/tpe.hpp"
#include "potp/numeric.hpp"

namespace potp::ml {

struct PipelineOptions {
  std::uint64_t seed = 7;
  int threads = 1;
  TpeOptions tpe;
  std::vector<double> curve_fractions = {0.25, 0.5, 0.75, 1.0};
  std::vector<Algorithm> families = {kAllAlgorithms.begin(), kAllAlgorithms.end()};
  bool run_tpe = true;
  bool run_rfecv = true;
};

/// One line of the step-by-step optimisation table.
struct StageRow {
  std::string step;
  Algorithm algorithm = Algorithm::LogReg;
  std::size_t n_features = 0;
  double cv_mean = kNaN;
  double cv_std = kNaN;
  double test_score = kNaN;
  Hyperparams hyperparams;
  bool skipped = false;
};

struct PipelineResult {
  ModelArtifact artifact;
  EvalReport test_report;
  SplitPlan plan;
  SelectionReport selection;
  std::vector<CurvePoint> curve;  // chosen family, default hyperparameters
  std::optional<TpeResult> tpe;
  std::optional<RfecvResult> rfe;
  std::optional<TpeResult> tpe_reopt;
  std::vector<StageRow> stages;
  std::vector<std::string> dropped_features;
};

namespace detail {

/// Best hyperparameters for `a` on `cv`, never worse than `incumbent`.
inline Hyperparams optimise(Algorithm a, const Hyperparams& incumbent, double incumbent_score, const CvData& cv,
                            std::uint64_t seed, const PipelineOptions& opt, std::optional<TpeResult>& out,
                            double& score) {
  score = incumbent_score;
  if (!opt.run_tpe || search_space(a).empty()) return incumbent;
  out = tpe_optimize(
      search_space(a), [&](const Hyperparams& hp) { return cross_validate(a, hp, cv, opt.threads).mean; }, seed,
      opt.tpe);
  if (out->best_score > incumbent_score) {
    score = out->best_score;
    return out->best;
  }
  return incumbent;
}

}  // namespace detail

/// Scale, split, select a family, tune, eliminate features, re-tune, train on
/// every training subject and score the held-out test subjects.
inline PipelineResult run_pipeline(const Dataset& d, Task task, const PipelineOptions& opt,
                                   std::optional<SplitPlan> given_plan = std::nullopt) {
  if (d.size() == 0) throw InvalidArgument("no labeled rows for task " + to_string(task));
  PipelineResult res;
  res.plan = given_plan ? *given_plan : make_split_plan(d.subjects(), opt.seed);
  validate_plan(res.plan);
  const auto train_rows = d.rows_of(res.plan.train_subjects), test_rows = d.rows_of(res.plan.test_subjects);
  assert_no_leakage(d, train_rows, test_rows, "test/train split");
  if (test_rows.empty()) throw InvalidArgument("no labeled rows for the test subjects");
  if (train_rows.size() + test_rows.size() != d.size())
    throw InvalidArgument("dataset contains subjects outside the split plan");

  const Dataset train_raw = d.subset(train_rows);
  const ScalerStats scaler = fit_scaler(train_raw.X, train_raw.feature_names);
  res.dropped_features = scaler.dropped;
  const Dataset train = train_raw.select_features(scaler.kept);
  const Matrix X_train = apply_scaler(train_raw.X, scaler);
  const Matrix X_test = apply_scaler(d.X.select_rows(test_rows), scaler);
  std::vector<int> y_test;
  for (auto r : test_rows) y_test.push_back(d.y[r]);

  const CvData cv = prepare_cv(train, res.plan);
  res.selection = select_model(cv, opt.threads, opt.families);
  const Algorithm a = res.selection.chosen;
  res.curve = learning_curve(a, {}, train, res.plan, opt.curve_fractions, opt.threads);
  const CvResult first = [&] {
    for (const auto& e : res.selection.entries)
      if (e.algorithm == a) return e.cv;
    return CvResult{};
  }();
  const std::size_t d_all = scaler.kept.size();
  res.stages.push_back({"First training", a, d_all, first.mean, first.std, kNaN, {}, false});

  double score = first.mean;
  Hyperparams hp = detail::optimise(a, {}, first.mean, cv, derive_seed(opt.seed, "tpe", 1), opt, res.tpe, score);
  {
    const auto r = cross_validate(a, hp, cv, opt.threads);
    res.stages.push_back({"Hyperparameter Opt.", a, d_all, r.mean, r.std, kNaN, hp, !res.tpe.has_value()});
  }

  std::vector<std::size_t> selected(d_all);
  std::iota(selected.begin(), selected.end(), 0);
  if (opt.run_rfecv) {
    res.rfe = rfecv(a, hp, cv, X_train, train.y, opt.threads);
    selected = res.rfe->selected;
  }
  const CvData cv_sel = cv.select_features(selected);
  const auto after_rfe = cross_validate(a, hp, cv_sel, opt.threads);
  res.stages.push_back({"RFECV", a, selected.size(), after_rfe.mean, after_rfe.std, kNaN, hp, !opt.run_rfecv});

  hp = detail::optimise(a, hp, after_rfe.mean, cv_sel, derive_seed(opt.seed, "tpe", 2), opt, res.tpe_reopt, score);
  const auto final_cv = cross_validate(a, hp, cv_sel, opt.threads);
  res.stages.push_back(
      {"Hyperparameter Re-Opt.", a, selected.size(), final_cv.mean, final_cv.std, kNaN, hp, !res.tpe_reopt});

  const Matrix Xtr_sel = X_train.select_cols(selected), Xte_sel = X_test.select_cols(selected);
  auto model = make_classifier(a, hp);
  model->fit(Xtr_sel, train.y, d.n_classes(), derive_seed(opt.seed, "final"));
  res.test_report = evaluate(y_test, model->predict(Xte_sel), d.n_classes(), d.class_names);
  res.test_report.cv_scores = final_cv.val_scores;
  res.test_report.cv_mean = final_cv.mean;
  res.test_report.cv_std = final_cv.std;
  res.stages.push_back({"Test on Unseen Data", a, selected.size(), final_cv.mean, final_cv.std,
                        task_score(res.test_report), hp, false});

  auto& art = res.artifact;
  art.algorithm = a;
  art.hyperparams = hp;
  art.task = task;
  art.class_names = d.class_names;
  art.scaler = scaler;
  for (auto c : selected) art.selected_features.push_back(train.feature_names[c]);
  art.seed = opt.seed;
  art.model = std::move(model);
  art.metrics = {{"test", report_to_json(res.test_report)},
                 {"test_score", task_score(res.test_report)},
                 {"cv_mean", final_cv.mean},
                 {"cv_std", final_cv.std},
                 {"test_subjects", res.plan.test_subjects}};
  return res;
}

/// Labels a feature matrix using thresholds fitted on the training subjects'
/// segments only, then runs the pipeline on the requested task.
struct FullRun {
  labeling::PotpThresholds thresholds;
  labeling::LabeledDataset labeled;
  Dataset dataset;
  PipelineResult result;
};

/// Labels, splits and trains in one go. Thresholds are fit on the training
/// subjects' t_rel unless `fixed` supplies them.
inline FullRun run_full(const FeatureMatrix& m, const std::vector<labeling::TimeError>& errors, Task task,
                        const PipelineOptions& opt, const labeling::GroupingOptions& grouping = {},
                        const std::optional<labeling::PotpThresholds>& fixed = std::nullopt) {
  std::set<std::string> ids;
  for (const auto& k : m.keys) ids.insert(k.subject_id);
  const SplitPlan plan = make_split_plan({ids.begin(), ids.end()}, opt.seed);
  const std::set<std::string> train(plan.train_subjects.begin(), plan.train_subjects.end());
  std::vector<double> t_train;
  for (const auto& e : errors)
    if (train.contains(e.subject_id)) t_train.push_back(e.t_rel);
  FullRun run;
  run.thresholds = fixed ? *fixed : labeling::fit_potp_thresholds(t_train);
  run.labeled = labeling::assign_labels(m, errors, run.thresholds, grouping);
  run.dataset = make_task_dataset(run.labeled, task);
  // Subjects without rows for this task drop out of the plan.
  const auto present = run.dataset.subjects();
  const std::set<std::string> have(present.begin(), present.end());
  SplitPlan p = plan;
  auto keep = [&](std::vector<std::string>& v) { std::erase_if(v, [&](const auto& s) { return !have.contains(s); }); };
  keep(p.test_subjects);
  keep(p.train_subjects);
  for (auto& f : p.folds) {
    keep(f.training_subjects);
    keep(f.validation_subjects);
  }
  run.result = run_pipeline(run.dataset, task, opt, p);
  return run;
}

inline std::string stages_csv(const std::vector<StageRow>& rows) {
  std::ostringstream o;
  o.precision(17);
  o << "step,algorithm,n_features,cv_mean,cv_std,test_score,hyperparameters\n";
  for (const auto& r : rows) {
    std::string hp;
    for (const auto& [k, v] : r.hyperparams) {
      std::ostringstream s;
      s.precision(17);
      s << k << '=' << v;
      hp += (hp.empty() ? "" : ";") + s.str();
    }
    auto num = [](double v) {
      std::ostringstream s;
      s.precision(17);
      if (!std::isnan(v)) s << v;
      return s.str();
    };
    o << r.step << ',' << to_string(r.algorithm) << ',' << r.n_features << ',' << num(r.cv_mean) << ','
      << num(r.cv_std) << ',' << num(r.test_score) << ',' << hp << '\n';
  }
  return o.str();
}

}  // namespace potp::ml

#endif  // POTP_ML_PIPELINE_HPP_
