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

#ifndef POTP_NUMERIC_HPP_
#define POTP_NUMERIC_HPP_

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

namespace potp {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

inline double mean(std::span<const double> x) {
  if (x.empty()) return kNaN;
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

inline double median(std::span<const double> x) {
  if (x.empty()) return kNaN;
  std::vector<double> v(x.begin(), x.end());
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  if (v.size() % 2 == 1) return v[mid];
  const double upper = v[mid];
  const double lower = *std::max_element(v.begin(), v.begin() + mid);
  return 0.5 * (lower + upper);
}

/// Variance with divisor n (ddof = 0) or n - 1 (ddof = 1).
inline double variance(std::span<const double> x, int ddof = 0) {
  const auto n = static_cast<double>(x.size());
  if (n - ddof <= 0) return kNaN;
  const double m = mean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return ss / (n - ddof);
}

inline double stddev(std::span<const double> x, int ddof = 0) {
  return std::sqrt(variance(x, ddof));
}

inline double mean_square(std::span<const double> x) {
  if (x.empty()) return kNaN;
  double s = 0.0;
  for (double v : x) s += v * v;
  return s / static_cast<double>(x.size());
}

/// Least-squares slope of y against x.
inline double ls_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) return kNaN;
  const double mx = mean(x), my = mean(y);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxx > 0.0 ? sxy / sxx : kNaN;
}

/// Slope of uniformly sampled y (spacing dt).
inline double ls_slope_uniform(std::span<const double> y, double dt) {
  std::vector<double> t(y.size());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = static_cast<double>(i) * dt;
  return ls_slope(t, y);
}

inline std::vector<double> diff(std::span<const double> x) {
  std::vector<double> d;
  if (x.size() < 2) return d;
  d.reserve(x.size() - 1);
  for (std::size_t i = 1; i < x.size(); ++i) d.push_back(x[i] - x[i - 1]);
  return d;
}

/// Linear interpolation of (xs, ys) at the query points; xs increasing.
/// Queries outside the range are clamped to the end values.
inline std::vector<double> interp_linear(std::span<const double> xs,
                                         std::span<const double> ys,
                                         std::span<const double> query) {
  std::vector<double> out(query.size());
  std::size_t j = 0;
  for (std::size_t i = 0; i < query.size(); ++i) {
    const double q = query[i];
    if (q <= xs.front()) {
      out[i] = ys.front();
      continue;
    }
    if (q >= xs.back()) {
      out[i] = ys.back();
      continue;
    }
    while (j + 1 < xs.size() && xs[j + 1] < q) ++j;
    while (j > 0 && xs[j] > q) --j;
    const double w = (q - xs[j]) / (xs[j + 1] - xs[j]);
    out[i] = ys[j] + w * (ys[j + 1] - ys[j]);
  }
  return out;
}

/// Sub-sample location of an extremum at index i via a parabola through
/// (i-1, i, i+1). Returns the fractional offset in [-0.5, 0.5].
inline double parabolic_offset(std::span<const double> y, std::size_t i) {
  if (i == 0 || i + 1 >= y.size()) return 0.0;
  const double a = y[i - 1], b = y[i], c = y[i + 1];
  const double denom = a - 2.0 * b + c;
  if (denom == 0.0) return 0.0;
  return std::clamp(0.5 * (a - c) / denom, -0.5, 0.5);
}

}  // namespace potp

#endif  // POTP_NUMERIC_HPP_
