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

#ifndef POTP_ML_MODELS_SVM_HPP_
#define POTP_ML_MODELS_SVM_HPP_

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "potp/ml/models/classifier.hpp"

namespace potp::ml {

namespace detail {

struct BinarySvm {
  std::vector<std::vector<double>> sv;
  std::vector<double> coef;  // alpha_i * y_i
  double rho = 0.0;
  bool trivial = false;      // no positive examples: always negative
};

/// SMO with second-order working-set selection on a precomputed kernel.
/// yy holds +1/-1 labels.
inline BinarySvm smo(const Matrix& X, const Matrix& K, const std::vector<double>& yy, double C, double eps) {
  constexpr double kTau = 1e-12;
  const std::size_t n = yy.size();
  BinarySvm out;
  if (std::none_of(yy.begin(), yy.end(), [](double v) { return v > 0; })) {
    out.trivial = true;
    return out;
  }
  std::vector<double> alpha(n, 0.0), G(n, -1.0);
  auto upper = [&](std::size_t t) { return alpha[t] >= C; };
  auto lower = [&](std::size_t t) { return alpha[t] <= 0.0; };
  const std::size_t max_iter = std::max<std::size_t>(100000, 100 * n);
  for (std::size_t iter = 0; iter < max_iter; ++iter) {
    double gmax = -std::numeric_limits<double>::infinity();
    std::size_t i = n;
    for (std::size_t t = 0; t < n; ++t) {
      if (yy[t] > 0) {
        if (!upper(t) && -G[t] >= gmax) gmax = -G[t], i = t;
      } else if (!lower(t) && G[t] >= gmax) {
        gmax = G[t], i = t;
      }
    }
    if (i == n) break;
    double gmax2 = -std::numeric_limits<double>::infinity();
    double best = std::numeric_limits<double>::infinity();
    std::size_t j = n;
    for (std::size_t t = 0; t < n; ++t) {
      const double kit = K(i, t);
      if (yy[t] > 0) {
        if (lower(t)) continue;
        gmax2 = std::max(gmax2, G[t]);
        const double gd = gmax + G[t];
        if (gd > 0) {
          const double quad = K(i, i) + K(t, t) - 2.0 * kit;
          const double obj = -(gd * gd) / (quad > 0 ? quad : kTau);
          if (obj <= best) best = obj, j = t;
        }
      } else {
        if (upper(t)) continue;
        gmax2 = std::max(gmax2, -G[t]);
        const double gd = gmax - G[t];
        if (gd > 0) {
          const double quad = K(i, i) + K(t, t) - 2.0 * kit;
          const double obj = -(gd * gd) / (quad > 0 ? quad : kTau);
          if (obj <= best) best = obj, j = t;
        }
      }
    }
    if (gmax + gmax2 < eps || j == n) break;

    const double ai = alpha[i], aj = alpha[j];
    const double qij = yy[i] * yy[j] * K(i, j);
    if (yy[i] != yy[j]) {
      double quad = K(i, i) + K(j, j) + 2.0 * qij;
      if (quad <= 0) quad = kTau;
      const double delta = (-G[i] - G[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0) {
        if (alpha[j] < 0) alpha[j] = 0, alpha[i] = diff;
      } else if (alpha[i] < 0) {
        alpha[i] = 0, alpha[j] = -diff;
      }
      if (diff > 0) {
        if (alpha[i] > C) alpha[i] = C, alpha[j] = C - diff;
      } else if (alpha[j] > C) {
        alpha[j] = C, alpha[i] = C + diff;
      }
    } else {
      double quad = K(i, i) + K(j, j) - 2.0 * qij;
      if (quad <= 0) quad = kTau;
      const double delta = (G[i] - G[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > C) {
        if (alpha[i] > C) alpha[i] = C, alpha[j] = sum - C;
      } else if (alpha[j] < 0) {
        alpha[j] = 0, alpha[i] = sum;
      }
      if (sum > C) {
        if (alpha[j] > C) alpha[j] = C, alpha[i] = sum - C;
      } else if (alpha[i] < 0) {
        alpha[i] = 0, alpha[j] = sum;
      }
    }
    const double dai = alpha[i] - ai, daj = alpha[j] - aj;
    for (std::size_t t = 0; t < n; ++t)
      G[t] += yy[t] * (yy[i] * K(i, t) * dai + yy[j] * K(j, t) * daj);
  }

  double ub = std::numeric_limits<double>::infinity(), lb = -ub, sum_free = 0.0;
  std::size_t n_free = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double yg = yy[t] * G[t];
    if (upper(t)) {
      if (yy[t] < 0) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else if (lower(t)) {
      if (yy[t] > 0) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else {
      ++n_free;
      sum_free += yg;
    }
  }
  out.rho = n_free ? sum_free / static_cast<double>(n_free) : 0.5 * (ub + lb);
  for (std::size_t t = 0; t < n; ++t)
    if (alpha[t] > 0) {
      const auto r = X.row(t);
      out.sv.emplace_back(r.begin(), r.end());
      out.coef.push_back(alpha[t] * yy[t]);
    }
  return out;
}

}  // namespace detail

/// RBF-kernel support vector machine, one-vs-rest for more than two classes.
/// Probabilities are the softmax of the decision values (binary: [-f, f]).
class Svm final : public Classifier {
 public:
  static constexpr double kDefaultC = 1.0;
  static constexpr double kTolerance = 1e-3;

  explicit Svm(Hyperparams hp = {}) : Classifier(std::move(hp)) {}
  Algorithm algorithm() const override { return Algorithm::SVM; }

  static SearchSpace search_space() {
    return {{"C", ParamKind::LogFloat, 0.01, 100.0, {}}, {"gamma", ParamKind::LogFloat, 1e-4, 10.0, {}}};
  }

  std::vector<double> decision_values(std::span<const double> x) const {
    std::vector<double> f;
    for (const auto& m : models_) {
      if (m.trivial) {
        f.push_back(-1e3);
        continue;
      }
      double s = -m.rho;
      for (std::size_t i = 0; i < m.sv.size(); ++i) s += m.coef[i] * kernel(m.sv[i], x);
      f.push_back(s);
    }
    return f;
  }

 protected:
  void do_fit(const Matrix& X, const std::vector<int>& y, std::uint64_t) override {
    const double C = hp_or(hp_, "C", kDefaultC);
    gamma_ = hp_or(hp_, "gamma", 1.0 / static_cast<double>(X.cols));
    const std::size_t n = X.rows;
    Matrix K(n, n);
    for (std::size_t a = 0; a < n; ++a) {
      K(a, a) = 1.0;
      for (std::size_t b = 0; b < a; ++b) K(a, b) = K(b, a) = kernel(X.row(a), X.row(b));
    }
    models_.clear();
    const int problems = n_classes_ == 2 ? 1 : n_classes_;
    for (int p = 0; p < problems; ++p) {
      const int positive = n_classes_ == 2 ? 1 : p;
      std::vector<double> yy(n);
      for (std::size_t i = 0; i < n; ++i) yy[i] = y[i] == positive ? 1.0 : -1.0;
      models_.push_back(detail::smo(X, K, yy, C, kTolerance));
    }
  }

  std::vector<double> do_proba(std::span<const double> x) const override {
    auto f = decision_values(x);
    if (n_classes_ == 2) f = {-f[0], f[0]};
    softmax(f);
    return f;
  }

  nlohmann::json params_to_json() const override {
    nlohmann::json ms = nlohmann::json::array();
    for (const auto& m : models_) ms.push_back({{"sv", m.sv}, {"coef", m.coef}, {"rho", m.rho}, {"trivial", m.trivial}});
    return {{"gamma", gamma_}, {"models", ms}};
  }
  void params_from_json(const nlohmann::json& j) override {
    gamma_ = j.at("gamma").get<double>();
    models_.clear();
    for (const auto& m : j.at("models"))
      models_.push_back({m.at("sv").get<std::vector<std::vector<double>>>(), m.at("coef").get<std::vector<double>>(),
                         m.at("rho").get<double>(), m.at("trivial").get<bool>()});
  }

 private:
  double kernel(std::span<const double> a, std::span<const double> b) const {
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) s += (a[j] - b[j]) * (a[j] - b[j]);
    return std::exp(-gamma_ * s);
  }

  double gamma_ = 1.0;
  std::vector<detail::BinarySvm> models_;
};

}  // namespace potp::ml

#endif  // POTP_ML_MODELS_SVM_HPP_
