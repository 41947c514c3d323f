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

#ifndef POTP_ML_MODELS_LDA_HPP_
#define POTP_ML_MODELS_LDA_HPP_

#include <cmath>
#include <vector>

#include "potp/ml/models/classifier.hpp"

namespace potp::ml {

/// Linear discriminant analysis with a pooled covariance shrunk towards a
/// scaled identity: (1 - gamma) S + gamma tr(S)/d I.
class Lda final : public Classifier {
 public:
  static constexpr double kDefaultShrinkage = 0.1;

  explicit Lda(Hyperparams hp = {}) : Classifier(std::move(hp)) {}
  Algorithm algorithm() const override { return Algorithm::LDA; }

  static SearchSpace search_space() { return {{"shrinkage", ParamKind::Float, 0.0, 1.0, {}}}; }

  std::optional<std::vector<double>> feature_importance() const override {
    // Spread of the class coefficients around their mean; adding a constant
    // to every class leaves the posterior unchanged.
    const std::size_t d = n_features_, k = static_cast<std::size_t>(n_classes_);
    std::vector<double> imp(d, 0.0);
    for (std::size_t j = 0; j < d; ++j) {
      double m = 0.0;
      for (std::size_t c = 0; c < k; ++c) m += coef_[c * d + j];
      m /= static_cast<double>(k);
      for (std::size_t c = 0; c < k; ++c) imp[j] += std::abs(coef_[c * d + j] - m);
      imp[j] /= static_cast<double>(k);
    }
    return imp;
  }

 protected:
  void do_fit(const Matrix& X, const std::vector<int>& y, std::uint64_t) override {
    const double gamma = std::clamp(hp_or(hp_, "shrinkage", kDefaultShrinkage), 0.0, 1.0);
    const std::size_t d = X.cols, k = static_cast<std::size_t>(n_classes_), n = X.rows;
    const auto counts = class_counts(y, n_classes_);
    std::vector<double> means(k * d, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < d; ++j) means[static_cast<std::size_t>(y[i]) * d + j] += X(i, j);
    for (std::size_t c = 0; c < k; ++c)
      if (counts[c])
        for (std::size_t j = 0; j < d; ++j) means[c * d + j] /= static_cast<double>(counts[c]);
    Matrix S(d, d);
    for (std::size_t i = 0; i < n; ++i) {
      const double* mu = means.data() + static_cast<std::size_t>(y[i]) * d;
      for (std::size_t a = 0; a < d; ++a) {
        const double da = X(i, a) - mu[a];
        for (std::size_t b = 0; b <= a; ++b) S(a, b) += da * (X(i, b) - mu[b]);
      }
    }
    double tr = 0.0;
    for (std::size_t a = 0; a < d; ++a) {
      for (std::size_t b = 0; b <= a; ++b) {
        S(a, b) /= static_cast<double>(n);
        S(b, a) = S(a, b);
      }
      tr += S(a, a);
    }
    const double iso = tr / static_cast<double>(d);
    const double ridge = 1e-9 * std::max(iso, 1.0);
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = 0; b < d; ++b) {
        S(a, b) *= (1.0 - gamma);
        if (a == b) S(a, b) += gamma * iso + ridge;
      }
    cholesky(S);
    coef_.assign(k * d, 0.0);
    intercept_.assign(k, kLogZero);
    for (std::size_t c = 0; c < k; ++c) {
      if (!counts[c]) continue;
      std::vector<double> mu(means.begin() + static_cast<std::ptrdiff_t>(c * d),
                             means.begin() + static_cast<std::ptrdiff_t>((c + 1) * d));
      const auto w = cholesky_solve(S, mu);
      double q = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        coef_[c * d + j] = w[j];
        q += w[j] * mu[j];
      }
      intercept_[c] = -0.5 * q + std::log(static_cast<double>(counts[c]) / static_cast<double>(n));
    }
  }

  std::vector<double> do_proba(std::span<const double> x) const override {
    const std::size_t d = n_features_, k = static_cast<std::size_t>(n_classes_);
    std::vector<double> z(k);
    for (std::size_t c = 0; c < k; ++c) {
      if (intercept_[c] <= kLogZero) {
        z[c] = kLogZero;
        continue;
      }
      double s = intercept_[c];
      for (std::size_t j = 0; j < d; ++j) s += coef_[c * d + j] * x[j];
      z[c] = s;
    }
    softmax(z);
    return z;
  }

  nlohmann::json params_to_json() const override { return {{"coef", coef_}, {"intercept", intercept_}}; }
  void params_from_json(const nlohmann::json& j) override {
    coef_ = j.at("coef").get<std::vector<double>>();
    intercept_ = j.at("intercept").get<std::vector<double>>();
  }

 private:
  std::vector<double> coef_;
  std::vector<double> intercept_;
};

}  // namespace potp::ml

#endif  // POTP_ML_MODELS_LDA_HPP_
