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

#ifndef POTP_ML_DATASET_HPP_
#define POTP_ML_DATASET_HPP_

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "potp/core/feature_matrix.hpp"
#include "potp/error.hpp"
#include "potp/labeling/labeling.hpp"
#include "potp/ml/matrix.hpp"

namespace potp::ml {

enum class Task { State3, Potp2 };

inline std::string to_string(Task t) { return t == Task::State3 ? "state3" : "potp2"; }

inline Task task_from_string(const std::string& s) {
  if (s == "state3") return Task::State3;
  if (s == "potp2") return Task::Potp2;
  throw InvalidArgument("unknown task '" + s + "' (expected state3 or potp2)");
}

/// Class names in label-index order. For the binary task the positive class
/// (index 1) is Faster.
inline std::vector<std::string> class_names(Task t) {
  if (t == Task::State3) return {"Emotional", "Neutral", "Cognitive"};
  return {"Slower", "Faster"};
}

/// Rows of one classification task; `groups` holds the subject of each row.
struct Dataset {
  Matrix X;
  std::vector<int> y;
  std::vector<std::string> groups;
  std::vector<RowKey> keys;
  std::vector<std::string> feature_names;
  std::vector<std::string> class_names;

  std::size_t size() const { return y.size(); }
  int n_classes() const { return static_cast<int>(class_names.size()); }

  std::vector<std::string> subjects() const {
    std::set<std::string> s(groups.begin(), groups.end());
    return {s.begin(), s.end()};
  }

  std::vector<std::size_t> rows_of(const std::vector<std::string>& subjects) const {
    const std::set<std::string> s(subjects.begin(), subjects.end());
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < groups.size(); ++i)
      if (s.contains(groups[i])) out.push_back(i);
    return out;
  }

  Dataset subset(std::span<const std::size_t> rows) const {
    Dataset d;
    d.X = X.select_rows(rows);
    for (auto r : rows) {
      d.y.push_back(y[r]);
      d.groups.push_back(groups[r]);
      if (!keys.empty()) d.keys.push_back(keys[r]);
    }
    d.feature_names = feature_names;
    d.class_names = class_names;
    return d;
  }

  Dataset select_features(std::span<const std::size_t> cols) const {
    Dataset d = *this;
    d.X = X.select_cols(cols);
    d.feature_names.clear();
    for (auto c : cols) d.feature_names.push_back(feature_names[c]);
    return d;
  }
};

/// Builds the task's rows: state3 keeps windows of segments 2-3 (Neutral),
/// 4 and 8 (Emotional), 5 and 7 (Cognitive); potp2 keeps Faster and Slower
/// windows.
inline Dataset make_task_dataset(const labeling::LabeledDataset& ld, Task task) {
  using labeling::PotpLabel;
  using labeling::StateLabel;
  Dataset d;
  d.feature_names = ld.features.columns;
  d.class_names = class_names(task);
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < ld.features.n_rows(); ++i) {
    int label = -1;
    if (task == Task::State3) {
      switch (ld.state[i]) {
        case StateLabel::Emotional: label = 0; break;
        case StateLabel::Neutral: label = 1; break;
        case StateLabel::Cognitive: label = 2; break;
        case StateLabel::Excluded: break;
      }
    } else {
      if (ld.potp[i] == PotpLabel::Slower) label = 0;
      if (ld.potp[i] == PotpLabel::Faster) label = 1;
    }
    if (label < 0) continue;
    keep.push_back(i);
    d.y.push_back(label);
    d.groups.push_back(ld.features.keys[i].subject_id);
    d.keys.push_back(ld.features.keys[i]);
  }
  if (keep.empty()) throw InvalidArgument("no labeled rows for task " + to_string(task));
  d.X = Matrix(keep.size(), d.feature_names.size());
  for (std::size_t i = 0; i < keep.size(); ++i)
    std::copy(ld.features.rows[keep[i]].begin(), ld.features.rows[keep[i]].end(), d.X.row(i).begin());
  return d;
}

}  // namespace potp::ml

#endif  // POTP_ML_DATASET_HPP_
