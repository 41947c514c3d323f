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

#ifndef POTP_ML_MODELS_GNB_HPP_
#define POTP_ML_MODELS_GNB_HPP_

#include <cmath>
#include <numbers>
#include <vector>

#include "potp/ml/models/classifier.hpp"

namespace potp::ml {

/// Gaussian naive Bayes: per-class diagonal Gaussians with a variance floor.
class Gnb final : public Classifier {
 public:
  static constexpr double kVarFloor = 1e-9;

  explicit Gnb(Hyperparams hp = {}) : Classifier(std::move(hp)) {}
  Algorithm algorithm() const override { return Algorithm::GNB; }

  static SearchSpace search_space() { return {}; }

 protected:
  void do_fit(const Matrix& X, const std::vector<int>& y, std::uint64_t) override {
    const std::size_t d = X.cols, k = static_cast<std::size_t>(n_classes_);
    const auto counts = class_counts(y, n_classes_);
    mean_.assign(k * d, 0.0);
    var_.assign(k * d, 0.0);
    log_prior_.assign(k, kLogZero);
    for (std::size_t i = 0; i < X.rows; ++i)
      for (std::size_t j = 0; j < d; ++j) mean_[static_cast<std::size_t>(y[i]) * d + j] += X(i, j);
    for (std::size_t c = 0; c < k; ++c)
      if (counts[c])
        for (std::size_t j = 0; j < d; ++j) mean_[c * d + j] /= static_cast<double>(counts[c]);
    for (std::size_t i = 0; i < X.rows; ++i) {
      const auto c = static_cast<std::size_t>(y[i]);
      for (std::size_t j = 0; j < d; ++j) {
        const double e = X(i, j) - mean_[c * d + j];
        var_[c * d + j] += e * e;
      }
    }
    for (std::size_t c = 0; c < k; ++c) {
      for (std::size_t j = 0; j < d; ++j)
        var_[c * d + j] = std::max(counts[c] ? var_[c * d + j] / static_cast<double>(counts[c]) : 1.0, kVarFloor);
      if (counts[c]) log_prior_[c] = std::log(static_cast<double>(counts[c]) / static_cast<double>(X.rows));
    }
  }

  std::vector<double> do_proba(std::span<const double> x) const override {
    const std::size_t d = n_features_, k = static_cast<std::size_t>(n_classes_);
    std::vector<double> z(k);
    for (std::size_t c = 0; c < k; ++c) {
      if (log_prior_[c] <= kLogZero) {
        z[c] = kLogZero;
        continue;
      }
      double s = log_prior_[c];
      for (std::size_t j = 0; j < d; ++j) {
        const double v = var_[c * d + j], e = x[j] - mean_[c * d + j];
        s -= 0.5 * (std::log(2.0 * std::numbers::pi * v) + e * e / v);
      }
      z[c] = s;
    }
    softmax(z);
    return z;
  }

  nlohmann::json params_to_json() const override {
    return {{"mean", mean_}, {"var", var_}, {"log_prior", log_prior_}};
  }
  void params_from_json(const nlohmann::json& j) override {
    mean_ = j.at("mean").get<std::vector<double>>();
    var_ = j.at("var").get<std::vector<double>>();
    log_prior_ = j.at("log_prior").get<std::vector<double>>();
  }

 private:
  std::vector<double> mean_, var_, log_prior_;
};

}  // namespace potp::ml

#endif  // POTP_ML_MODELS_GNB_HPP_
