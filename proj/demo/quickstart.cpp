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

// Generates a small synthetic cohort, extracts features, trains the
// three-class model and prints the optimisation table and top features.

#include <iostream>

#include "potp/explain/shapley.hpp"
#include "potp/features/matrix_builder.hpp"
#include "potp/labeling/labeling.hpp"
#include "potp/ml/pipeline.hpp"
#include "potp/synth/cohort.hpp"

using namespace potp;

int main() {
  const std::uint64_t seed = 7;
  const auto sessions = synth::generate_cohort(10, synth::Scenario::Separable, seed);
  const FeatureMatrix features = features::build_feature_matrix(sessions);
  const auto errors = labeling::time_errors(sessions);

  for (const auto& row : labeling::run_group_tests(errors))
    std::cout << labeling::to_string(row.state) << ": mean t_rel " << row.test.mean << ", p " << row.test.p_value
              << " -> " << row.direction << "\n";

  ml::PipelineOptions opt;
  opt.seed = seed;
  opt.families = {ml::Algorithm::LogReg, ml::Algorithm::LDA, ml::Algorithm::GNB};
  opt.tpe.budget = 12;
  const auto run = ml::run_full(features, errors, ml::Task::State3, opt);
  std::cout << "\n" << ml::stages_csv(run.result.stages) << "\n" << ml::confusion_csv(run.result.test_report);

  // Attributions for a few held-out windows.
  const auto& d = run.dataset;
  const auto test_rows = d.rows_of(run.result.plan.test_subjects);
  const auto train_rows = d.rows_of(run.result.plan.train_subjects);
  const std::vector<std::size_t> some(test_rows.begin(), test_rows.begin() + std::min<std::size_t>(8, test_rows.size()));
  const auto attr = explain::explain_artifact(run.result.artifact, d.X.select_rows(some), d.X.select_rows(train_rows),
                                              d.feature_names, 200, seed);
  std::cout << "\ntop features:\n";
  const auto ranking = explain::rank_features(attr);
  for (std::size_t i = 0; i < std::min<std::size_t>(5, ranking.size()); ++i)
    std::cout << "  " << ranking[i].feature << " " << ranking[i].mean_abs << "\n";
  return 0;
}
