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

#ifndef POTP_DSP_PPG_HPP_
#define POTP_DSP_PPG_HPP_

#include <algorithm>
#include <vector>

#include "potp/dsp/filter.hpp"
#include "potp/dsp/peaks.hpp"
#include "potp/numeric.hpp"

namespace potp::dsp {

struct PpgPulse {
  double foot_s;
  double peak_s;
  double reflected_s;
  double next_foot_s;

  double pp() const { return next_foot_s - foot_s; }
  double prt() const { return peak_s - foot_s; }
  double pdt() const { return next_foot_s - peak_s; }
  double pw() const { return reflected_s - foot_s; }
};

struct PpgPulses {
  std::vector<PpgPulse> pulses;
  SignalChannel filtered;
};

inline constexpr double kPpgLowHz = 0.5;
inline constexpr double kPpgHighHz = 8.0;

/// Pulses are found on the 0.5-8 Hz band (slope maxima mark systolic
/// upstrokes). Landmark timing is then refined on a wider 0.5 Hz - 0.4 fs band:
/// the foot by intersecting tangents (tangent at the steepest upstroke point
/// against the preceding minimum), the systolic peak as the following maximum.
/// The reflected wave is the secondary maximum after the dicrotic notch or,
/// without a distinct notch, the shallowest-slope point of early diastole.
/// First and last pulses are dropped.
inline PpgPulses delineate_ppg(const SignalChannel& ppg) {
  PpgPulses out;
  out.filtered = bandpass(ppg, kPpgLowHz, kPpgHighHz);
  const auto& x = out.filtered.samples;
  const double fs = ppg.fs;
  if (is_flat(x, ppg.samples)) throw InvalidArgument("no pulses found");
  const std::size_t n = x.size();
  const std::vector<double> xw =
      fs * 0.4 > kPpgHighHz ? bandpass(ppg, kPpgLowHz, 0.4 * fs).samples : x;

  auto derivative = [&](const std::vector<double>& v) {
    std::vector<double> d(v.size(), 0.0);
    for (std::size_t i = 1; i + 1 < v.size(); ++i) d[i] = 0.5 * (v[i + 1] - v[i - 1]) * fs;
    return d;
  };
  const std::vector<double> slope = derivative(x);
  const std::vector<double> slope_w = derivative(xw);

  std::vector<double> positive;
  for (double s : slope)
    if (s > 0) positive.push_back(s);
  if (positive.empty()) throw InvalidArgument("no pulses found");
  std::sort(positive.begin(), positive.end());
  const double p99 = positive[static_cast<std::size_t>(0.99 * static_cast<double>(positive.size() - 1))];
  const auto refractory = static_cast<std::size_t>(std::lround(0.3 * fs));
  const auto up = find_peaks(slope, refractory, 0.3 * p99);
  if (up.size() < 3) throw InvalidArgument("no pulses found");

  const auto nudge = std::max<std::size_t>(2, static_cast<std::size_t>(std::lround(0.05 * fs)));
  std::vector<std::size_t> peaks(up.size());
  std::vector<double> feet(up.size()), peak_times(up.size());
  for (std::size_t k = 0; k < up.size(); ++k) {
    const std::size_t next = k + 1 < up.size() ? up[k + 1] : n;
    peaks[k] = argmax(x, up[k], next);
    const std::size_t pk = argmax(xw, peaks[k] > nudge ? peaks[k] - nudge : 0,
                                  std::min(n, peaks[k] + nudge + 1));
    peak_times[k] = ppg.t0 + (static_cast<double>(pk) + parabolic_offset(xw, pk)) / fs;

    std::size_t lo;
    if (k > 0) {
      lo = peaks[k - 1];
    } else {
      const std::size_t back = (up[1] - up[0]) / 2;
      lo = up[0] > back ? up[0] - back : 0;
    }
    const std::size_t steep = argmax(slope_w, up[k] > nudge ? std::max(lo, up[k] - nudge) : lo,
                                     std::min(pk, up[k] + nudge + 1));
    const std::size_t base = argmin(xw, lo, steep + 1);
    double foot = static_cast<double>(steep);
    if (slope_w[steep] > 0.0) foot -= (xw[steep] - xw[base]) / slope_w[steep] * fs;
    foot = std::max(foot, static_cast<double>(base));
    feet[k] = ppg.t0 + foot / fs;
  }

  std::vector<PpgPulse> pulses;
  for (std::size_t k = 0; k + 1 < up.size(); ++k) {
    const std::size_t p = peaks[k];
    const auto nf = static_cast<std::size_t>(std::max(0.0, (feet[k + 1] - ppg.t0) * fs));
    if (!(feet[k] < peak_times[k] && peak_times[k] < feet[k + 1]) || nf <= p + 2) continue;
    std::size_t reflected = 0;
    bool found = false;
    std::size_t i = p + 1;
    while (i + 1 < nf && !(x[i] <= x[i - 1] && x[i] < x[i + 1])) ++i;  // notch
    for (std::size_t j = i + 1; j + 1 < nf; ++j) {
      if (x[j] >= x[j - 1] && x[j] > x[j + 1]) {
        reflected = j;
        found = true;
        break;
      }
    }
    if (!found) {
      const std::size_t hi = p + std::max<std::size_t>(2, (nf - p) * 6 / 10);
      reflected = argmax(slope, p + 1, std::min(hi, nf));
    }
    const double reflected_s = ppg.t0 + (static_cast<double>(reflected) +
                                         (found ? parabolic_offset(x, reflected) : 0.0)) / fs;
    pulses.push_back({feet[k], peak_times[k], reflected_s, feet[k + 1]});
  }
  if (pulses.size() >= 2) pulses = {pulses.begin() + 1, pulses.end() - 1};
  if (pulses.empty()) throw InvalidArgument("no pulses found");
  out.pulses = std::move(pulses);
  return out;
}

}  // namespace potp::dsp

#endif  // POTP_DSP_PPG_HPP_
