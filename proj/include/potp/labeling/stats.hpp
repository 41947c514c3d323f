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

#ifndef POTP_LABELING_STATS_HPP_
#define POTP_LABELING_STATS_HPP_

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <string>

#include "potp/error.hpp"
#include "potp/numeric.hpp"

namespace potp::stats {

namespace detail {

/// Continued fraction for the incomplete beta function (modified Lentz).
inline double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIter = 500;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) return h;
  }
  return h;
}

}  // namespace detail

/// Regularized incomplete beta I_x(a, b).
inline double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0 && b > 0.0)) throw InvalidArgument("incomplete_beta: a and b must be positive");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * detail::beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * detail::beta_continued_fraction(b, a, 1.0 - x) / b;
}

/// P(T > t) for Student's t with df degrees of freedom.
inline double student_t_sf(double t, double df) {
  if (!(df > 0.0)) throw InvalidArgument("degrees of freedom must be positive");
  if (std::isinf(t)) return t > 0 ? 0.0 : 1.0;
  const double tail = 0.5 * incomplete_beta(0.5 * df, 0.5, df / (df + t * t));
  return t >= 0.0 ? tail : 1.0 - tail;
}

inline double student_t_cdf(double t, double df) { return 1.0 - student_t_sf(t, df); }

enum class Tail { Greater, Less };

inline std::string to_string(Tail t) { return t == Tail::Greater ? "greater" : "less"; }

struct TTestResult {
  double t_stat;
  double p_value;
  double mean;
  double sd;  // sample standard deviation
  std::size_t n;
};

/// One-sample t-test against zero. Tail::Greater tests mean > 0.
inline TTestResult one_tailed_t_test(std::span<const double> x, Tail tail) {
  if (x.size() < 2) throw InvalidArgument("t-test needs at least 2 observations");
  const double m = mean(x);
  const double sd = stddev(x, 1);
  if (!(sd > 0.0)) throw InvalidArgument("t-test: zero sample variance");
  const double n = static_cast<double>(x.size());
  const double t = m / (sd / std::sqrt(n));
  const double upper = student_t_sf(t, n - 1.0);
  const double p = tail == Tail::Greater ? upper : 1.0 - upper;
  return {t, std::clamp(p, 0.0, 1.0), m, sd, x.size()};
}

struct CorrelationResult {
  double r;
  double p_value;
  std::size_t n;
};

/// Pearson correlation with a two-tailed t-based p-value.
inline CorrelationResult pearson_corr_test(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw InvalidArgument("correlation inputs differ in length");
  if (x.size() < 3) throw InvalidArgument("correlation needs at least 3 pairs");
  const double mx = mean(x), my = mean(y);
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0) || !(syy > 0.0)) throw InvalidArgument("correlation: zero variance input");
  const double r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  const double df = static_cast<double>(x.size()) - 2.0;
  double p = 0.0;
  if (std::abs(r) < 1.0) {
    const double t = r * std::sqrt(df / (1.0 - r * r));
    p = std::clamp(2.0 * student_t_sf(std::abs(t), df), 0.0, 1.0);
  }
  return {r, p, x.size()};
}

inline double normal_pdf(double x, double mu, double sigma) {
  if (!(sigma > 0.0)) return kNaN;
  const double z = (x - mu) / sigma;
  return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * std::numbers::pi));
}

}  // namespace potp::stats

#endif  // POTP_LABELING_STATS_HPP_
