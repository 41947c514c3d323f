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

#ifndef POTP_ML_MODELS_LOGREG_HPP_
#define POTP_ML_MODELS_LOGREG_HPP_

#include <cmath>
#include <vector>

#include "potp/ml/models/classifier.hpp"

namespace potp::ml {

/// L2-regularized multinomial logistic regression fitted by full-batch
/// gradient descent with Armijo backtracking.
class LogReg final : public Classifier {
 public:
  static constexpr double kDefaultLambda = 0.01;
  static constexpr int kMaxIter = 500;
  static constexpr double kGradTol = 1e-6;

  explicit LogReg(Hyperparams hp = {}) : Classifier(std::move(hp)) {}
  Algorithm algorithm() const override { return Algorithm::LogReg; }

  static SearchSpace search_space() { return {{"lambda", ParamKind::LogFloat, 1e-4, 10.0, {}}}; }

  /// Mean cross-entropy plus lambda/2 * ||W||^2 (bias unpenalized).
  /// theta holds K blocks of (d weights, bias).
  static double loss_and_gradient(const Matrix& X, const std::vector<int>& y, int K, double lambda,
                                  const std::vector<double>& theta, std::vector<double>* grad) {
    const std::size_t d = X.cols, stride = d + 1, k = static_cast<std::size_t>(K);
    const double inv_n = 1.0 / static_cast<double>(X.rows);
    if (grad) grad->assign(theta.size(), 0.0);
    std::vector<double> z(k);
    double loss = 0.0;
    for (std::size_t i = 0; i < X.rows; ++i) {
      const auto x = X.row(i);
      for (std::size_t c = 0; c < k; ++c) {
        const double* w = theta.data() + c * stride;
        double s = w[d];
        for (std::size_t j = 0; j < d; ++j) s += w[j] * x[j];
        z[c] = s;
      }
      double m = z[0];
      for (double v : z) m = std::max(m, v);
      double se = 0.0;
      for (double v : z) se += std::exp(v - m);
      const double lse = m + std::log(se);
      const auto yi = static_cast<std::size_t>(y[i]);
      loss += (lse - z[yi]) * inv_n;
      if (grad) {
        for (std::size_t c = 0; c < k; ++c) {
          const double r = (std::exp(z[c] - lse) - (c == yi ? 1.0 : 0.0)) * inv_n;
          double* g = grad->data() + c * stride;
          for (std::size_t j = 0; j < d; ++j) g[j] += r * x[j];
          g[d] += r;
        }
      }
    }
    for (std::size_t c = 0; c < k; ++c)
      for (std::size_t j = 0; j < d; ++j) {
        const double w = theta[c * stride + j];
        loss += 0.5 * lambda * w * w;
        if (grad) (*grad)[c * stride + j] += lambda * w;
      }
    return loss;
  }

  std::optional<std::vector<double>> feature_importance() const override {
    const std::size_t d = n_features_, stride = d + 1;
    std::vector<double> imp(d, 0.0);
    for (int c = 0; c < n_classes_; ++c)
      for (std::size_t j = 0; j < d; ++j) imp[j] += std::abs(theta_[static_cast<std::size_t>(c) * stride + j]);
    for (double& v : imp) v /= n_classes_;
    return imp;
  }

  const std::vector<double>& theta() const { return theta_; }

 protected:
  void do_fit(const Matrix& X, const std::vector<int>& y, std::uint64_t) override {
    const double lambda = hp_or(hp_, "lambda", kDefaultLambda);
    theta_.assign(static_cast<std::size_t>(n_classes_) * (X.cols + 1), 0.0);
    std::vector<double> grad, trial(theta_.size()), tgrad;
    double loss = loss_and_gradient(X, y, n_classes_, lambda, theta_, &grad);
    double step = 1.0;
    for (int it = 0; it < kMaxIter; ++it) {
      double g2 = 0.0;
      for (double g : grad) g2 += g * g;
      if (std::sqrt(g2) < kGradTol) break;
      double trial_loss = 0.0;
      bool accepted = false;
      for (int bt = 0; bt < 60; ++bt) {
        for (std::size_t i = 0; i < theta_.size(); ++i) trial[i] = theta_[i] - step * grad[i];
        trial_loss = loss_and_gradient(X, y, n_classes_, lambda, trial, nullptr);
        if (trial_loss <= loss - 0.5 * step * g2) {
          accepted = true;
          break;
        }
        step *= 0.5;
      }
      if (!accepted) break;
      theta_.swap(trial);
      loss = loss_and_gradient(X, y, n_classes_, lambda, theta_, &grad);
      step *= 2.0;
    }
  }

  std::vector<double> do_proba(std::span<const double> x) const override {
    const std::size_t d = n_features_, stride = d + 1;
    std::vector<double> z(static_cast<std::size_t>(n_classes_));
    for (std::size_t c = 0; c < z.size(); ++c) {
      const double* w = theta_.data() + c * stride;
      double s = w[d];
      for (std::size_t j = 0; j < d; ++j) s += w[j] * x[j];
      z[c] = s;
    }
    softmax(z);
    return z;
  }

  nlohmann::json params_to_json() const override { return {{"theta", theta_}}; }
  void params_from_json(const nlohmann::json& j) override { theta_ = j.at("theta").get<std::vector<double>>(); }

 private:
  std::vector<double> theta_;
};

}  // namespace potp::ml

#endif  // POTP_ML_MODELS_LOGREG_HPP_
