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

// Independent reference implementations used only by the tests. They favour
// directness over speed and share no code with the library.
#ifndef POTP_TESTS_ORACLES_HPP_
#define POTP_TESTS_ORACLES_HPP_

#include <cmath>
#include <complex>
#include <algorithm>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

inline constexpr double kPi = std::numbers::pi;

/// Magnitude response of a digital Butterworth low-pass (bilinear
/// transform, prewarped) at frequency f.
inline double butter_lowpass_gain(int order, double fc, double fs, double f) {
  const double r = std::tan(kPi * f / fs) / std::tan(kPi * fc / fs);
  return 1.0 / std::sqrt(1.0 + std::pow(r, 2 * order));
}

inline double butter_highpass_gain(int order, double fc, double fs, double f) {
  if (f == 0.0) return 0.0;
  const double r = std::tan(kPi * fc / fs) / std::tan(kPi * f / fs);
  return 1.0 / std::sqrt(1.0 + std::pow(r, 2 * order));
}

/// Welch PSD by direct DFT: periodic Hann, mean removed per segment,
/// density scaling, one-sided.
inline std::vector<double> welch_direct(const std::vector<double>& x, double fs, std::size_t nseg,
                                        std::size_t step) {
  std::vector<double> w(nseg);
  double u = 0.0;
  for (std::size_t i = 0; i < nseg; ++i) {
    w[i] = 0.5 - 0.5 * std::cos(2.0 * kPi * static_cast<double>(i) / static_cast<double>(nseg));
    u += w[i] * w[i];
  }
  const std::size_t nf = nseg / 2 + 1;
  std::vector<double> acc(nf, 0.0);
  std::size_t count = 0;
  for (std::size_t s = 0; s + nseg <= x.size(); s += step, ++count) {
    double m = 0.0;
    for (std::size_t i = 0; i < nseg; ++i) m += x[s + i];
    m /= static_cast<double>(nseg);
    for (std::size_t k = 0; k < nf; ++k) {
      std::complex<long double> z = 0;
      for (std::size_t i = 0; i < nseg; ++i) {
        const long double ang = -2.0L * kPi * static_cast<long double>(k * i) / nseg;
        z += static_cast<long double>((x[s + i] - m) * w[i]) *
             std::complex<long double>(std::cos(ang), std::sin(ang));
      }
      double p = static_cast<double>(std::norm(z)) / (fs * u);
      if (k != 0 && !(nseg % 2 == 0 && k == nseg / 2)) p *= 2.0;
      acc[k] += p;
    }
  }
  for (auto& a : acc) a /= static_cast<double>(count);
  return acc;
}

/// Classic Lomb-Scargle normalised by the variance, single window, no
/// averaging. Returns one value per frequency.
inline std::vector<double> lomb_classic(const std::vector<double>& t, const std::vector<double>& y,
                                        const std::vector<double>& freqs) {
  double m = 0.0;
  for (double v : y) m += v;
  m /= static_cast<double>(y.size());
  std::vector<double> out;
  for (double f : freqs) {
    const double w = 2.0 * kPi * f;
    double s2 = 0.0, c2 = 0.0;
    for (double ti : t) {
      s2 += std::sin(2 * w * ti);
      c2 += std::cos(2 * w * ti);
    }
    const double tau = std::atan2(s2, c2) / (2 * w);
    double yc = 0, ys = 0, cc = 0, ss = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      const double c = std::cos(w * (t[i] - tau)), s = std::sin(w * (t[i] - tau));
      yc += (y[i] - m) * c;
      ys += (y[i] - m) * s;
      cc += c * c;
      ss += s * s;
    }
    out.push_back(0.5 * (yc * yc / cc + ys * ys / ss));
  }
  return out;
}

/// Composite Simpson rule with n (even) intervals.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 20000) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

/// Student-t density.
inline double t_density(double x, double df) {
  const double c = std::exp(std::lgamma((df + 1) / 2) - std::lgamma(df / 2)) / std::sqrt(df * kPi);
  return c * std::pow(1 + x * x / df, -(df + 1) / 2);
}

/// Upper tail P(T > t), integrated after the substitution x = tan(theta) so
/// the infinite range becomes [atan t, pi/2).
inline double t_upper_tail(double t, double df) {
  auto g = [df](double th) {
    // The integrand tends to c * x^(1 - df); evaluate just inside the end.
    const double x = std::tan(std::min(th, kPi / 2 - 1e-9));
    return t_density(x, df) * (1.0 + x * x);
  };
  return simpson(g, std::atan(t), kPi / 2, 200000);
}

/// Standard normal CDF.
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

/// F-1 of class c by direct counting over the label pairs.
inline double f1_direct(const std::vector<int>& t, const std::vector<int>& p, int c) {
  double tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (p[i] == c && t[i] == c) tp += 1;
    if (p[i] == c && t[i] != c) fp += 1;
    if (p[i] != c && t[i] == c) fn += 1;
  }
  return tp == 0 ? 0.0 : 2 * tp / (2 * tp + fp + fn);
}

/// Support-weighted mean of the per-class F-1.
inline double weighted_f1_direct(const std::vector<int>& t, const std::vector<int>& p, int k) {
  double num = 0;
  for (int c = 0; c < k; ++c) num += static_cast<double>(std::count(t.begin(), t.end(), c)) * f1_direct(t, p, c);
  return t.empty() ? 0.0 : num / static_cast<double>(t.size());
}

}  // namespace oracle

#endif  // POTP_TESTS_ORACLES_HPP_
