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

#ifndef POTP_ML_SCALER_HPP_
#define POTP_ML_SCALER_HPP_

#include <cmath>
#include <string>
#include <vector>

#include "json.hpp"
#include "potp/error.hpp"
#include "potp/ml/matrix.hpp"

namespace potp::ml {

inline constexpr double kMaxNanFraction = 0.05;

/// Training-set statistics for the retained features.
struct ScalerStats {
  std::vector<std::size_t> kept;       // column indices of the input retained
  std::vector<std::string> kept_names;
  std::vector<std::string> dropped;    // names of dropped columns
  std::vector<double> mean;            // per kept column; also the imputation value
  std::vector<double> std;             // population standard deviation
};

struct ScalerOptions {
  /// Drop NaN-heavy and constant columns. When false every column is kept;
  /// a constant column is centred only.
  bool drop = true;
  bool warn = true;
};

inline ScalerStats fit_scaler(const Matrix& X, const std::vector<std::string>& names,
                              const ScalerOptions& opt = {}) {
  if (names.size() != X.cols) throw InvalidArgument("dimension mismatch: feature names");
  ScalerStats s;
  for (std::size_t j = 0; j < X.cols; ++j) {
    std::size_t nan = 0;
    double sum = 0.0;
    for (std::size_t i = 0; i < X.rows; ++i) {
      const double v = X(i, j);
      if (std::isnan(v)) ++nan;
      else sum += v;
    }
    const std::size_t finite = X.rows - nan;
    const double frac = X.rows ? static_cast<double>(nan) / static_cast<double>(X.rows) : 1.0;
    if (opt.drop && (frac > kMaxNanFraction || finite == 0)) {
      s.dropped.push_back(names[j]);
      continue;
    }
    const double m = finite ? sum / static_cast<double>(finite) : 0.0;
    // Imputed entries equal the mean, so they add nothing to the sum of squares.
    double ss = 0.0;
    for (std::size_t i = 0; i < X.rows; ++i) {
      const double v = X(i, j);
      if (!std::isnan(v)) ss += (v - m) * (v - m);
    }
    const double sd = X.rows ? std::sqrt(ss / static_cast<double>(X.rows)) : 0.0;
    if (!(sd > 1e-12 * std::max(1.0, std::abs(m)))) {
      if (opt.drop) {
        if (opt.warn) warn("dropping zero-variance feature " + names[j]);
        s.dropped.push_back(names[j]);
        continue;
      }
    }
    s.kept.push_back(j);
    s.kept_names.push_back(names[j]);
    s.mean.push_back(m);
    s.std.push_back(sd > 1e-12 * std::max(1.0, std::abs(m)) ? sd : 1.0);
  }
  if (opt.drop && s.kept.empty()) throw InvalidArgument("no usable features after scaling");
  return s;
}

/// Selects the kept columns, imputes NaN with the training mean and z-scores.
inline Matrix apply_scaler(const Matrix& X, const ScalerStats& s) {
  Matrix out(X.rows, s.kept.size());
  for (std::size_t i = 0; i < X.rows; ++i)
    for (std::size_t k = 0; k < s.kept.size(); ++k) {
      double v = X(i, s.kept[k]);
      if (std::isnan(v)) v = s.mean[k];
      out(i, k) = (v - s.mean[k]) / s.std[k];
    }
  return out;
}

inline nlohmann::json scaler_to_json(const ScalerStats& s) {
  return {{"features", s.kept_names}, {"mean", s.mean}, {"std", s.std}, {"dropped", s.dropped}};
}

/// Rebuilds stats for rows whose columns are exactly `features` in order.
inline ScalerStats scaler_from_json(const nlohmann::json& j) {
  ScalerStats s;
  s.kept_names = j.at("features").get<std::vector<std::string>>();
  s.mean = j.at("mean").get<std::vector<double>>();
  s.std = j.at("std").get<std::vector<double>>();
  s.dropped = j.at("dropped").get<std::vector<std::string>>();
  if (s.mean.size() != s.kept_names.size() || s.std.size() != s.kept_names.size())
    throw FormatError("scaler: inconsistent lengths");
  for (std::size_t k = 0; k < s.kept_names.size(); ++k) s.kept.push_back(k);
  return s;
}

}  // namespace potp::ml

#endif  // POTP_ML_SCALER_HPP_
