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

#ifndef POTP_ML_MODELS_CLASSIFIER_HPP_
#define POTP_ML_MODELS_CLASSIFIER_HPP_

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "potp/error.hpp"
#include "potp/ml/matrix.hpp"

namespace potp::ml {

/// The eight families, in tie-break order.
enum class Algorithm { LogReg, DTC, KNN, LDA, GNB, SVM, RF, XGB };

inline constexpr std::array<Algorithm, 8> kAllAlgorithms = {Algorithm::LogReg, Algorithm::DTC, Algorithm::KNN,
                                                            Algorithm::LDA,    Algorithm::GNB, Algorithm::SVM,
                                                            Algorithm::RF,     Algorithm::XGB};

inline std::string to_string(Algorithm a) {
  static const std::array<const char*, 8> names = {"LogReg", "DTC", "KNN", "LDA", "GNB", "SVM", "RF", "XGB"};
  return names[static_cast<std::size_t>(a)];
}

inline Algorithm algorithm_from_string(const std::string& s) {
  for (auto a : kAllAlgorithms)
    if (to_string(a) == s) return a;
  throw InvalidArgument("unknown algorithm '" + s + "'");
}

using Hyperparams = std::map<std::string, double>;

enum class ParamKind { Float, LogFloat, Int, OddInt, Categorical };

struct ParamSpec {
  std::string name;
  ParamKind kind = ParamKind::Float;
  double lo = 0.0;
  double hi = 1.0;
  std::vector<double> choices;  // Categorical only
};

using SearchSpace = std::vector<ParamSpec>;

inline double hp_or(const Hyperparams& hp, const std::string& key, double fallback) {
  const auto it = hp.find(key);
  return it == hp.end() ? fallback : it->second;
}

class Classifier {
 public:
  virtual ~Classifier() = default;

  virtual Algorithm algorithm() const = 0;

  /// Validates inputs and trains. Classes absent from y get zero probability.
  void fit(const Matrix& X, const std::vector<int>& y, int n_classes, std::uint64_t seed) {
    if (X.rows != y.size()) throw InvalidArgument("dimension mismatch: " + std::to_string(X.rows) + " rows vs " +
                                                  std::to_string(y.size()) + " labels");
    if (X.cols == 0) throw InvalidArgument("dimension mismatch: no features");
    if (n_classes < 2) throw InvalidArgument("at least two classes required");
    std::set<int> seen;
    for (int v : y) {
      if (v < 0 || v >= n_classes) throw InvalidArgument("label out of range");
      seen.insert(v);
    }
    if (seen.size() < 2) throw InvalidArgument("training labels contain a single class");
    for (double v : X.data)
      if (!std::isfinite(v)) throw InvalidArgument("non-finite feature value in training data");
    n_classes_ = n_classes;
    n_features_ = X.cols;
    do_fit(X, y, seed);
  }

  /// Class probabilities for one row; they sum to 1.
  std::vector<double> predict_proba(std::span<const double> x) const {
    if (x.size() != n_features_)
      throw InvalidArgument("dimension mismatch: model expects " + std::to_string(n_features_) + " features, got " +
                            std::to_string(x.size()));
    return do_proba(x);
  }

  int predict(std::span<const double> x) const { return argmax_index(predict_proba(x)); }

  std::vector<int> predict(const Matrix& X) const {
    std::vector<int> out;
    out.reserve(X.rows);
    for (std::size_t i = 0; i < X.rows; ++i) out.push_back(predict(X.row(i)));
    return out;
  }

  /// Native importance per feature, if the family has one.
  virtual std::optional<std::vector<double>> feature_importance() const { return std::nullopt; }

  const Hyperparams& hyperparams() const { return hp_; }
  int n_classes() const { return n_classes_; }
  std::size_t n_features() const { return n_features_; }

  nlohmann::json to_json() const {
    return {{"n_classes", n_classes_}, {"n_features", n_features_}, {"params", params_to_json()}};
  }
  void from_json(const nlohmann::json& j) {
    n_classes_ = j.at("n_classes").get<int>();
    n_features_ = j.at("n_features").get<std::size_t>();
    params_from_json(j.at("params"));
  }

 protected:
  explicit Classifier(Hyperparams hp) : hp_(std::move(hp)) {}

  virtual void do_fit(const Matrix& X, const std::vector<int>& y, std::uint64_t seed) = 0;
  virtual std::vector<double> do_proba(std::span<const double> x) const = 0;
  virtual nlohmann::json params_to_json() const = 0;
  virtual void params_from_json(const nlohmann::json& j) = 0;

  Hyperparams hp_;
  int n_classes_ = 0;
  std::size_t n_features_ = 0;
};

/// Per-class row counts.
inline std::vector<std::size_t> class_counts(const std::vector<int>& y, int n_classes) {
  std::vector<std::size_t> c(static_cast<std::size_t>(n_classes), 0);
  for (int v : y) ++c[static_cast<std::size_t>(v)];
  return c;
}

// Stand-in for log(0) that keeps softmax free of NaN.
inline constexpr double kLogZero = -1e300;

}  // namespace potp::ml

#endif  // POTP_ML_MODELS_CLASSIFIER_HPP_
