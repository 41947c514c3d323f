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

#ifndef POTP_ML_MODELS_KNN_HPP_
#define POTP_ML_MODELS_KNN_HPP_

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "potp/ml/models/classifier.hpp"

namespace potp::ml {

/// k nearest neighbours, Euclidean. Equal distances go to the earlier
/// training row; vote ties go to the smallest class index.
class Knn final : public Classifier {
 public:
  static constexpr int kDefaultK = 5;

  explicit Knn(Hyperparams hp = {}) : Classifier(std::move(hp)) {}
  Algorithm algorithm() const override { return Algorithm::KNN; }

  static SearchSpace search_space() { return {{"k", ParamKind::OddInt, 1, 25, {}}}; }

 protected:
  void do_fit(const Matrix& X, const std::vector<int>& y, std::uint64_t) override {
    X_ = X;
    y_ = y;
  }

  std::vector<double> do_proba(std::span<const double> x) const override {
    const auto k = std::min<std::size_t>(
        X_.rows, static_cast<std::size_t>(std::max(1L, std::lround(hp_or(hp_, "k", kDefaultK)))));
    std::vector<std::pair<double, std::size_t>> dist(X_.rows);
    for (std::size_t i = 0; i < X_.rows; ++i) {
      const auto r = X_.row(i);
      double s = 0.0;
      for (std::size_t j = 0; j < r.size(); ++j) s += (r[j] - x[j]) * (r[j] - x[j]);
      dist[i] = {s, i};
    }
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
    std::vector<double> p(static_cast<std::size_t>(n_classes_), 0.0);
    for (std::size_t i = 0; i < k; ++i) p[static_cast<std::size_t>(y_[dist[i].second])] += 1.0;
    for (double& v : p) v /= static_cast<double>(k);
    return p;
  }

  nlohmann::json params_to_json() const override {
    return {{"rows", X_.rows}, {"cols", X_.cols}, {"X", X_.data}, {"y", y_}};
  }
  void params_from_json(const nlohmann::json& j) override {
    X_.rows = j.at("rows").get<std::size_t>();
    X_.cols = j.at("cols").get<std::size_t>();
    X_.data = j.at("X").get<std::vector<double>>();
    y_ = j.at("y").get<std::vector<int>>();
  }

 private:
  Matrix X_;
  std::vector<int> y_;
};

}  // namespace potp::ml

#endif  // POTP_ML_MODELS_KNN_HPP_
