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

#ifndef POTP_ML_METRICS_HPP_
#define POTP_ML_METRICS_HPP_

#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "json.hpp"
#include "potp/error.hpp"

namespace potp::ml {

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
};

struct EvalReport {
  std::vector<std::string> class_names;
  std::vector<ClassMetrics> per_class;
  std::vector<std::vector<std::size_t>> confusion;  // rows: true class, cols: predicted
  double weighted_f1 = 0.0;
  double accuracy = 0.0;
  std::vector<double> cv_scores;
  double cv_mean = 0.0;
  double cv_std = 0.0;
};

/// Precision/recall/F-1 per class with zero-division mapped to 0.
inline EvalReport evaluate(const std::vector<int>& y_true, const std::vector<int>& y_pred, int n_classes,
                           std::vector<std::string> names = {}) {
  if (y_true.size() != y_pred.size()) throw InvalidArgument("length mismatch between labels and predictions");
  EvalReport r;
  const auto k = static_cast<std::size_t>(n_classes);
  if (names.empty())
    for (int c = 0; c < n_classes; ++c) names.push_back(std::to_string(c));
  r.class_names = std::move(names);
  r.confusion.assign(k, std::vector<std::size_t>(k, 0));
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    if (y_true[i] < 0 || y_true[i] >= n_classes || y_pred[i] < 0 || y_pred[i] >= n_classes)
      throw InvalidArgument("label out of range");
    ++r.confusion[static_cast<std::size_t>(y_true[i])][static_cast<std::size_t>(y_pred[i])];
  }
  std::size_t total = 0, correct = 0;
  double wsum = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    ClassMetrics m;
    std::size_t predicted = 0;
    for (std::size_t t = 0; t < k; ++t) predicted += r.confusion[t][c];
    m.support = std::accumulate(r.confusion[c].begin(), r.confusion[c].end(), std::size_t{0});
    const double tp = static_cast<double>(r.confusion[c][c]);
    m.precision = predicted ? tp / static_cast<double>(predicted) : 0.0;
    m.recall = m.support ? tp / static_cast<double>(m.support) : 0.0;
    m.f1 = (m.precision + m.recall) > 0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
    wsum += static_cast<double>(m.support) * m.f1;
    total += m.support;
    correct += r.confusion[c][c];
    r.per_class.push_back(m);
  }
  r.weighted_f1 = total ? wsum / static_cast<double>(total) : 0.0;
  r.accuracy = total ? static_cast<double>(correct) / static_cast<double>(total) : 0.0;
  return r;
}

/// Model-selection score: F-1 of the positive class (index 1) for binary
/// tasks, support-weighted F-1 otherwise.
inline double task_score(const std::vector<int>& y_true, const std::vector<int>& y_pred, int n_classes) {
  const EvalReport r = evaluate(y_true, y_pred, n_classes);
  return n_classes == 2 ? r.per_class[1].f1 : r.weighted_f1;
}

inline double task_score(const EvalReport& r) {
  return r.per_class.size() == 2 ? r.per_class[1].f1 : r.weighted_f1;
}

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

/// Population mean and standard deviation.
inline MeanStd mean_std(const std::vector<double>& v) {
  MeanStd m;
  if (v.empty()) return m;
  for (double x : v) m.mean += x;
  m.mean /= static_cast<double>(v.size());
  for (double x : v) m.std += (x - m.mean) * (x - m.mean);
  m.std = std::sqrt(m.std / static_cast<double>(v.size()));
  return m;
}

inline nlohmann::json report_to_json(const EvalReport& r) {
  nlohmann::json per = nlohmann::json::array();
  for (std::size_t c = 0; c < r.per_class.size(); ++c)
    per.push_back({{"class", r.class_names[c]},
                   {"precision", r.per_class[c].precision},
                   {"recall", r.per_class[c].recall},
                   {"f1", r.per_class[c].f1},
                   {"support", r.per_class[c].support}});
  return {{"per_class", per},          {"confusion", r.confusion}, {"weighted_f1", r.weighted_f1},
          {"accuracy", r.accuracy},    {"cv_scores", r.cv_scores}, {"cv_mean", r.cv_mean},
          {"cv_std", r.cv_std}};
}

/// Confusion matrix as CSV: true_class,<predicted class names...>
inline std::string confusion_csv(const EvalReport& r) {
  std::string out = "true_class";
  for (const auto& n : r.class_names) out += "," + n;
  out += '\n';
  for (std::size_t t = 0; t < r.confusion.size(); ++t) {
    out += r.class_names[t];
    for (auto v : r.confusion[t]) out += "," + std::to_string(v);
    out += '\n';
  }
  return out;
}

}  // namespace potp::ml

#endif  // POTP_ML_METRICS_HPP_
