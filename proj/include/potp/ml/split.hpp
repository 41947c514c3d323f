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

#ifndef POTP_ML_SPLIT_HPP_
#define POTP_ML_SPLIT_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "potp/error.hpp"
#include "potp/ml/dataset.hpp"
#include "potp/random.hpp"

namespace potp::ml {

inline constexpr int kNumFolds = 10;
inline constexpr double kTestFraction = 0.22;
inline constexpr double kValidationFraction = 0.2;
inline constexpr std::size_t kMinSubjects = 5;

struct Fold {
  std::vector<std::string> validation_subjects;
  std::vector<std::string> training_subjects;
};

struct SplitPlan {
  std::vector<std::string> test_subjects;
  std::vector<std::string> train_subjects;
  std::vector<Fold> folds;
  std::uint64_t seed = 0;
};

inline std::size_t test_count(std::size_t n_subjects) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(kTestFraction * static_cast<double>(n_subjects))));
}

inline std::size_t validation_count(std::size_t n_train) {
  return std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(kValidationFraction * static_cast<double>(n_train) - 1e-9)));
}

/// Subject-exclusive split. Validation subjects are drawn from a shuffled
/// queue that is refilled (reshuffled) only once exhausted, so every training
/// subject validates before any repeats.
inline SplitPlan make_split_plan(std::vector<std::string> subjects, std::uint64_t seed,
                                 int n_folds = kNumFolds) {
  std::sort(subjects.begin(), subjects.end());
  if (std::adjacent_find(subjects.begin(), subjects.end()) != subjects.end())
    throw InvalidArgument("duplicate subject id in split");
  if (subjects.size() < kMinSubjects)
    throw InvalidArgument("at least " + std::to_string(kMinSubjects) + " subjects required for a split, got " +
                          std::to_string(subjects.size()));
  SplitPlan plan;
  plan.seed = seed;
  Rng rng(seed, "split-test");
  std::vector<std::string> order = subjects;
  rng.shuffle(order);
  const std::size_t n_test = test_count(subjects.size());
  plan.test_subjects.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_test));
  plan.train_subjects.assign(order.begin() + static_cast<std::ptrdiff_t>(n_test), order.end());
  std::sort(plan.test_subjects.begin(), plan.test_subjects.end());
  std::sort(plan.train_subjects.begin(), plan.train_subjects.end());

  const std::size_t n_val = validation_count(plan.train_subjects.size());
  Rng frng(seed, "split-folds");
  std::vector<std::string> queue;
  for (int f = 0; f < n_folds; ++f) {
    std::set<std::string> val;
    std::vector<std::string> deferred;
    while (val.size() < n_val) {
      if (queue.empty()) {
        queue = plan.train_subjects;
        frng.shuffle(queue);
      }
      std::string s = std::move(queue.back());
      queue.pop_back();
      // Straddling a refill can draw a subject already in this fold; it keeps
      // its place at the head of the new round.
      if (val.contains(s)) deferred.push_back(std::move(s));
      else val.insert(std::move(s));
    }
    for (auto it = deferred.rbegin(); it != deferred.rend(); ++it) queue.push_back(std::move(*it));
    Fold fold;
    fold.validation_subjects.assign(val.begin(), val.end());
    for (const auto& s : plan.train_subjects)
      if (!val.contains(s)) fold.training_subjects.push_back(s);
    plan.folds.push_back(std::move(fold));
  }
  return plan;
}

/// Throws LeakageError if any subject appears on both sides.
inline void assert_disjoint(const std::vector<std::string>& a, const std::vector<std::string>& b,
                            const std::string& what) {
  const std::set<std::string> sa(a.begin(), a.end());
  for (const auto& s : b)
    if (sa.contains(s)) throw LeakageError("subject " + s + " appears on both sides of " + what);
}

/// Row-level check: no subject owns rows in both index sets.
inline void assert_no_leakage(const Dataset& d, const std::vector<std::size_t>& train_rows,
                              const std::vector<std::size_t>& eval_rows, const std::string& what) {
  std::set<std::string> tr;
  for (auto r : train_rows) tr.insert(d.groups[r]);
  for (auto r : eval_rows)
    if (tr.contains(d.groups[r])) throw LeakageError("subject " + d.groups[r] + " appears on both sides of " + what);
}

inline void validate_plan(const SplitPlan& p) {
  assert_disjoint(p.test_subjects, p.train_subjects, "test/train split");
  for (std::size_t f = 0; f < p.folds.size(); ++f) {
    const auto& fold = p.folds[f];
    assert_disjoint(fold.validation_subjects, fold.training_subjects, "fold " + std::to_string(f));
    assert_disjoint(p.test_subjects, fold.training_subjects, "fold " + std::to_string(f) + " (test)");
    assert_disjoint(p.test_subjects, fold.validation_subjects, "fold " + std::to_string(f) + " (test)");
  }
}

inline nlohmann::json plan_to_json(const SplitPlan& p) {
  nlohmann::json folds = nlohmann::json::array();
  for (const auto& f : p.folds) folds.push_back({{"validation", f.validation_subjects}, {"training", f.training_subjects}});
  return {{"seed", p.seed}, {"test", p.test_subjects}, {"train", p.train_subjects}, {"folds", folds}};
}

}  // namespace potp::ml

#endif  // POTP_ML_SPLIT_HPP_
