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

#ifndef POTP_ML_RFECV_HPP_
#define POTP_ML_RFECV_HPP_

#include <numeric>
#include <string>
#include <vector>

#include "potp/ml/cv.hpp"
#include "potp/ml/models/factory.hpp"

namespace potp::ml {

struct RfecvResult {
  std::vector<std::size_t> selected;        // column indices into the input, ascending
  std::vector<std::string> selected_names;
  std::vector<double> mean_scores;          // mean_scores[k - 1]: mean CV score with k features
  std::vector<std::vector<double>> fold_scores;  // [fold][k - 1]
  std::vector<std::size_t> eliminated;     // columns dropped from the full-data fit, in order
};

namespace detail {

/// Importance of each column for family `a`, fitted on (X, y). Families
/// without their own measure use a default random forest on the same data.
inline std::vector<double> importance_for(const Classifier& fitted, const Matrix& X, const std::vector<int>& y,
                                          int n_classes, std::uint64_t seed) {
  if (auto imp = fitted.feature_importance()) return *imp;
  Rf surrogate;
  surrogate.fit(X, y, n_classes, derive_seed(seed, "rf-surrogate"));
  return *surrogate.feature_importance();
}

/// Position (within `imp`) of the least important feature; ties remove the
/// one with the larger original column index.
inline std::size_t weakest(const std::vector<double>& imp, const std::vector<std::size_t>& cols) {
  std::size_t w = 0;
  for (std::size_t i = 1; i < imp.size(); ++i)
    if (imp[i] < imp[w] || (imp[i] == imp[w] && cols[i] > cols[w])) w = i;
  return w;
}

}  // namespace detail

/// Recursive feature elimination, one feature per step, scored by
/// cross-validation on every fold. The subset size with the best mean score
/// wins (ties: fewer features); the subset itself comes from running the
/// same elimination on all training rows.
inline RfecvResult rfecv(Algorithm a, const Hyperparams& hp, const CvData& cv, const Matrix& X_full,
                         const std::vector<int>& y_full, int threads = 1) {
  const std::size_t d = cv.feature_names.size();
  if (d == 0) throw InvalidArgument("RFECV needs at least one feature");
  RfecvResult res;
  res.fold_scores.assign(cv.folds.size(), std::vector<double>(d, 0.0));
  parallel_for(cv.folds.size(), threads, [&](std::size_t fi) {
    const auto& f = cv.folds[fi];
    std::vector<std::size_t> cols(d);
    std::iota(cols.begin(), cols.end(), 0);
    const std::uint64_t seed = fold_seed(cv.seed, f.index);
    while (!cols.empty()) {
      const Matrix Xtr = f.X_train.select_cols(cols), Xva = f.X_val.select_cols(cols);
      auto m = make_classifier(a, hp);
      m->fit(Xtr, f.y_train, cv.n_classes, seed);
      res.fold_scores[fi][cols.size() - 1] = task_score(f.y_val, m->predict(Xva), cv.n_classes);
      if (cols.size() == 1) break;
      const auto imp = detail::importance_for(*m, Xtr, f.y_train, cv.n_classes, seed);
      cols.erase(cols.begin() + static_cast<std::ptrdiff_t>(detail::weakest(imp, cols)));
    }
  });
  res.mean_scores.assign(d, 0.0);
  for (std::size_t k = 0; k < d; ++k) {
    for (const auto& fs : res.fold_scores) res.mean_scores[k] += fs[k];
    res.mean_scores[k] /= static_cast<double>(res.fold_scores.size());
  }
  std::size_t best_k = 1;
  for (std::size_t k = 2; k <= d; ++k)
    if (res.mean_scores[k - 1] > res.mean_scores[best_k - 1]) best_k = k;

  std::vector<std::size_t> cols(d);
  std::iota(cols.begin(), cols.end(), 0);
  const std::uint64_t seed = derive_seed(cv.seed, "rfecv-final");
  while (cols.size() > best_k) {
    const Matrix X = X_full.select_cols(cols);
    auto m = make_classifier(a, hp);
    m->fit(X, y_full, cv.n_classes, seed);
    const auto imp = detail::importance_for(*m, X, y_full, cv.n_classes, seed);
    const std::size_t w = detail::weakest(imp, cols);
    res.eliminated.push_back(cols[w]);
    cols.erase(cols.begin() + static_cast<std::ptrdiff_t>(w));
  }
  res.selected = cols;
  for (auto c : res.selected) res.selected_names.push_back(cv.feature_names[c]);
  return res;
}

}  // namespace potp::ml

#endif  // POTP_ML_RFECV_HPP_
