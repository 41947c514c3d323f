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

#ifndef POTP_SPECTRAL_PSD_HPP_
#define POTP_SPECTRAL_PSD_HPP_

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "potp/error.hpp"
#include "potp/numeric.hpp"
#include "potp/spectral/fft.hpp"

namespace potp::spectral {

enum class PsdMethod { Welch, LombScargleWelch };

/// One-sided power spectral density on an increasing frequency grid.
struct PsdEstimate {
  std::vector<double> freqs_hz;
  std::vector<double> power;
  PsdMethod method = PsdMethod::Welch;
  double resolution_hz = 0.0;
};

struct Band {
  double lo_hz;
  double hi_hz;
};

/// Welch estimate: periodic Hann window, per-segment mean removal, density
/// scaling so that the integral over [0, fs/2] is the signal variance.
inline PsdEstimate welch_psd(std::span<const double> x, double fs, double seg_len_s,
                             double overlap_frac = 0.5) {
  if (!(fs > 0.0)) throw InvalidArgument("sampling rate must be positive");
  if (!(overlap_frac >= 0.0 && overlap_frac < 1.0))
    throw InvalidArgument("overlap must lie in [0, 1)");
  const auto seg = static_cast<std::size_t>(std::llround(seg_len_s * fs));
  if (seg < 2) throw InvalidArgument("Welch segment shorter than two samples");
  if (x.size() < seg)
    throw InvalidArgument("series too short for Welch: " + std::to_string(x.size()) +
                          " samples < segment of " + std::to_string(seg));
  const std::size_t noverlap = static_cast<std::size_t>(std::floor(overlap_frac * seg));
  const std::size_t step = seg - noverlap;
  const std::size_t n_segments = (x.size() - seg) / step + 1;

  std::vector<double> window(seg);
  double wsum2 = 0.0;
  for (std::size_t i = 0; i < seg; ++i) {
    window[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                     static_cast<double>(seg));
    wsum2 += window[i] * window[i];
  }

  const std::size_t n_freqs = seg / 2 + 1;
  PsdEstimate psd;
  psd.method = PsdMethod::Welch;
  psd.resolution_hz = fs / static_cast<double>(seg);
  psd.freqs_hz.resize(n_freqs);
  psd.power.assign(n_freqs, 0.0);
  for (std::size_t k = 0; k < n_freqs; ++k) psd.freqs_hz[k] = static_cast<double>(k) * psd.resolution_hz;

  std::vector<double> buf(seg);
  for (std::size_t s = 0; s < n_segments; ++s) {
    const auto part = x.subspan(s * step, seg);
    const double m = mean(part);
    for (std::size_t i = 0; i < seg; ++i) buf[i] = (part[i] - m) * window[i];
    const auto spectrum = fft_real(buf);
    for (std::size_t k = 0; k < n_freqs; ++k) {
      double p = std::norm(spectrum[k]) / (fs * wsum2);
      const bool unpaired = k == 0 || (seg % 2 == 0 && k == seg / 2);
      if (!unpaired) p *= 2.0;
      psd.power[k] += p;
    }
  }
  for (double& p : psd.power) p /= static_cast<double>(n_segments);
  return psd;
}

namespace detail {

inline void linear_detrend(std::span<const double> t, std::vector<double>& y) {
  const double slope = ls_slope(t, y);
  const double mt = mean(t), my = mean(y);
  for (std::size_t i = 0; i < y.size(); ++i)
    y[i] -= my + (std::isfinite(slope) ? slope * (t[i] - mt) : 0.0);
}

/// Classical Lomb-Scargle periodogram (with the time-offset tau), scaled to an
/// approximate one-sided density.
inline std::vector<double> lomb_single(std::span<const double> t, std::vector<double> y,
                                       std::span<const double> grid) {
  linear_detrend(t, y);
  const auto n = static_cast<double>(t.size());
  const double fs_eff = (n - 1.0) / (t.back() - t.front());
  std::vector<double> out(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double w = 2.0 * std::numbers::pi * grid[k];
    double s2 = 0.0, c2 = 0.0;
    for (double ti : t) {
      s2 += std::sin(2.0 * w * ti);
      c2 += std::cos(2.0 * w * ti);
    }
    const double tau = std::atan2(s2, c2) / (2.0 * w);
    double yc = 0.0, ys = 0.0, cc = 0.0, ss = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      const double arg = w * (t[i] - tau);
      const double c = std::cos(arg), s = std::sin(arg);
      yc += y[i] * c;
      ys += y[i] * s;
      cc += c * c;
      ss += s * s;
    }
    double p = 0.0;
    if (cc > 0.0) p += yc * yc / cc;
    if (ss > 0.0) p += ys * ys / ss;
    out[k] = p / fs_eff;  // 2 * (p / 2) / fs_eff
  }
  return out;
}

}  // namespace detail

inline constexpr std::size_t kLombMinSamples = 8;

/// Lomb-Scargle density for unevenly sampled data, averaged over two
/// half-overlapping sub-windows (each spanning 2/3 of the record) whenever
/// both contain at least kLombMinSamples points. Each sub-window is linearly
/// detrended.
inline PsdEstimate lomb_psd(std::span<const double> times_s, std::span<const double> values,
                            std::span<const double> freq_grid) {
  if (times_s.size() != values.size())
    throw InvalidArgument("lomb_psd: times and values differ in length");
  if (times_s.size() < kLombMinSamples)
    throw InvalidArgument("lomb_psd: need at least 8 samples, got " +
                          std::to_string(times_s.size()));
  if (freq_grid.empty()) throw InvalidArgument("lomb_psd: empty frequency grid");
  for (std::size_t i = 1; i < times_s.size(); ++i)
    if (!(times_s[i] > times_s[i - 1]))
      throw InvalidArgument("lomb_psd: times must be strictly increasing");
  for (double f : freq_grid)
    if (!(f > 0.0)) throw InvalidArgument("lomb_psd: grid frequencies must be positive");

  const double t_first = times_s.front(), t_last = times_s.back();
  const double span = t_last - t_first;
  const double sub = 2.0 * span / 3.0;
  std::vector<std::pair<std::size_t, std::size_t>> parts;
  for (double start : {t_first, t_first + span / 3.0}) {
    const auto lo = std::lower_bound(times_s.begin(), times_s.end(), start - 1e-12) - times_s.begin();
    const auto hi = std::upper_bound(times_s.begin(), times_s.end(), start + sub + 1e-12) - times_s.begin();
    parts.emplace_back(static_cast<std::size_t>(lo), static_cast<std::size_t>(hi));
  }
  bool use_parts = true;
  for (auto [lo, hi] : parts) use_parts &= (hi - lo) >= kLombMinSamples;
  if (!use_parts) parts = {{0, times_s.size()}};

  PsdEstimate psd;
  psd.method = PsdMethod::LombScargleWelch;
  psd.freqs_hz.assign(freq_grid.begin(), freq_grid.end());
  psd.power.assign(freq_grid.size(), 0.0);
  psd.resolution_hz = freq_grid.size() > 1 ? freq_grid[1] - freq_grid[0] : 0.0;
  for (auto [lo, hi] : parts) {
    const auto t = times_s.subspan(lo, hi - lo);
    const auto v = values.subspan(lo, hi - lo);
    const auto p = detail::lomb_single(t, std::vector<double>(v.begin(), v.end()), freq_grid);
    for (std::size_t k = 0; k < p.size(); ++k) psd.power[k] += p[k] / static_cast<double>(parts.size());
  }
  return psd;
}

/// Evenly spaced grid lo, lo + step, ..., up to hi inclusive.
inline std::vector<double> frequency_grid(double lo, double hi, double step) {
  std::vector<double> g;
  const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  for (std::size_t i = 0; i < n; ++i) g.push_back(lo + static_cast<double>(i) * step);
  return g;
}

namespace detail {

/// Integrates p(f) and f * p(f) over [lo, hi], with p piecewise linear between
/// grid points (edges interpolated).
inline std::pair<double, double> integrate_linear(const PsdEstimate& psd, double lo, double hi) {
  const auto& f = psd.freqs_hz;
  const auto& p = psd.power;
  double area = 0.0, moment = 0.0;
  for (std::size_t i = 0; i + 1 < f.size(); ++i) {
    const double a = std::max(lo, f[i]);
    const double b = std::min(hi, f[i + 1]);
    if (!(b > a)) continue;
    const double slope = (p[i + 1] - p[i]) / (f[i + 1] - f[i]);
    const double pa = p[i] + slope * (a - f[i]);
    const double pb = p[i] + slope * (b - f[i]);
    area += 0.5 * (pa + pb) * (b - a);
    moment += (b - a) / 6.0 * (a * (2.0 * pa + pb) + b * (pa + 2.0 * pb));
  }
  return {area, moment};
}

inline void check_band(const PsdEstimate& psd, double lo, double hi) {
  if (psd.freqs_hz.size() < 2) throw InvalidArgument("PSD grid has fewer than two points");
  const double tol = 1e-9 * std::max(1.0, psd.freqs_hz.back());
  if (!(lo < hi)) throw InvalidArgument("inverted band");
  if (lo < psd.freqs_hz.front() - tol || hi > psd.freqs_hz.back() + tol)
    throw InvalidArgument("band [" + std::to_string(lo) + ", " + std::to_string(hi) +
                          "] Hz outside PSD grid");
}

}  // namespace detail

/// Trapezoidal power in [lo, hi]; with `normalize_by`, divided by the power
/// in that reference band (NaN when the reference power is zero).
inline double band_power(const PsdEstimate& psd, Band band,
                         std::optional<Band> normalize_by = std::nullopt) {
  detail::check_band(psd, band.lo_hz, band.hi_hz);
  const double p = detail::integrate_linear(psd, band.lo_hz, band.hi_hz).first;
  if (!normalize_by) return p;
  detail::check_band(psd, normalize_by->lo_hz, normalize_by->hi_hz);
  const double total = detail::integrate_linear(psd, normalize_by->lo_hz, normalize_by->hi_hz).first;
  return total > 0.0 ? p / total : kNaN;
}

/// Power over the whole grid.
inline double total_power(const PsdEstimate& psd) {
  return detail::integrate_linear(psd, psd.freqs_hz.front(), psd.freqs_hz.back()).first;
}

/// Mean of a single Gaussian fitted to the PSD restricted to [lo, hi] by the
/// weighted-moment method: integral of f p(f) over integral of p(f).
inline double gaussian_peak_fit(const PsdEstimate& psd, double lo_hz = 0.15, double hi_hz = 0.5) {
  detail::check_band(psd, lo_hz, hi_hz);
  std::size_t positive = 0;
  for (std::size_t i = 0; i < psd.freqs_hz.size(); ++i)
    if (psd.freqs_hz[i] >= lo_hz && psd.freqs_hz[i] <= hi_hz && psd.power[i] > 0.0) ++positive;
  if (positive == 0) throw InvalidArgument("zero power in band");
  if (positive < 3) throw InvalidArgument("fewer than 3 grid points with positive power in band");
  const auto [area, moment] = detail::integrate_linear(psd, lo_hz, hi_hz);
  if (!(area > 0.0)) throw InvalidArgument("zero power in band");
  return std::clamp(moment / area, lo_hz, hi_hz);
}

/// Frequency of the largest PSD value within [lo, hi]; ties resolve to the
/// lowest frequency.
inline double peak_frequency(const PsdEstimate& psd, double lo_hz, double hi_hz) {
  double best_f = kNaN, best_p = -1.0;
  for (std::size_t i = 0; i < psd.freqs_hz.size(); ++i) {
    const double f = psd.freqs_hz[i];
    if (f < lo_hz || f > hi_hz) continue;
    if (psd.power[i] > best_p) {
      best_p = psd.power[i];
      best_f = f;
    }
  }
  return best_f;
}

}  // namespace potp::spectral

#endif  // POTP_SPECTRAL_PSD_HPP_
