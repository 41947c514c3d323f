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

#ifndef POTP_DSP_ECG_HPP_
#define POTP_DSP_ECG_HPP_

#include <algorithm>
#include <cmath>
#include <vector>

#include "potp/dsp/filter.hpp"
#include "potp/dsp/peaks.hpp"
#include "potp/numeric.hpp"

namespace potp::dsp {

inline constexpr double kMinPlausibleRR = 0.3;
inline constexpr double kMaxPlausibleRR = 2.0;

/// R-peak times and the successive RR intervals. rr_s[i] spans peaks i, i+1.
struct RRSeries {
  std::vector<std::size_t> peak_indices;
  std::vector<double> peak_times_s;
  std::vector<double> rr_s;
  std::vector<bool> implausible;  // rr outside [0.3, 2.0] s; flagged, kept

  std::size_t size() const { return rr_s.size(); }
};

inline RRSeries make_rr_series(std::vector<std::size_t> indices, std::vector<double> times) {
  RRSeries rr;
  rr.peak_indices = std::move(indices);
  rr.peak_times_s = std::move(times);
  for (std::size_t i = 1; i < rr.peak_times_s.size(); ++i) {
    const double d = rr.peak_times_s[i] - rr.peak_times_s[i - 1];
    rr.rr_s.push_back(d);
    rr.implausible.push_back(d < kMinPlausibleRR || d > kMaxPlausibleRR);
  }
  return rr;
}

/// QRS detector of the Pan-Tompkins family: 0.5-40 Hz band-pass, five-point
/// derivative, squaring, centred moving-window integration and an adaptive
/// signal/noise threshold with search-back. The R peak is the band-passed
/// maximum near each accepted integrator peak, refined to sub-sample time.
inline RRSeries detect_r_peaks(const SignalChannel& ecg) {
  if (ecg.fs < 128.0) throw InvalidArgument("ECG sampling rate must be >= 128 Hz");
  if (ecg.duration() < 10.0) throw InvalidArgument("ECG record shorter than 10 s");
  const double fs = ecg.fs;
  const std::vector<double> x = bandpass(ecg, 0.5, 40.0).samples;
  if (is_flat(x, ecg.samples)) throw InvalidArgument("no QRS detected");
  const std::size_t n = x.size();

  std::vector<double> energy(n, 0.0);
  for (std::size_t i = 2; i + 2 < n; ++i) {
    const double d = (-x[i - 2] - 2.0 * x[i - 1] + 2.0 * x[i + 1] + x[i + 2]) / 8.0;
    energy[i] = d * d;
  }
  const auto half = static_cast<std::size_t>(std::lround(0.075 * fs));
  std::vector<double> mwi(n, 0.0);
  {
    std::vector<double> csum(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) csum[i + 1] = csum[i] + energy[i];
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t lo = i >= half ? i - half : 0;
      const std::size_t hi = std::min(n, i + half + 1);
      mwi[i] = (csum[hi] - csum[lo]) / static_cast<double>(hi - lo);
    }
  }

  const auto refractory = static_cast<std::size_t>(std::lround(0.2 * fs));
  const std::vector<std::size_t> cand = find_peaks(mwi, refractory);
  if (cand.empty()) throw InvalidArgument("no QRS detected");

  const auto init_end = std::min(n, static_cast<std::size_t>(std::lround(2.0 * fs)));
  double spki = *std::max_element(mwi.begin(), mwi.begin() + init_end) / 3.0;
  double npki = mean(std::span<const double>(mwi).first(init_end)) / 2.0;

  std::vector<std::size_t> accepted;
  std::vector<double> recent_rr;
  std::size_t last_accepted_cand = 0;
  bool have_last = false;
  for (std::size_t c = 0; c < cand.size(); ++c) {
    const double pk = mwi[cand[c]];
    const double thr1 = npki + 0.25 * (spki - npki);
    if (pk > thr1) {
      if (have_last && recent_rr.size() >= 2) {
        const double rr_avg = mean(recent_rr);
        const double gap = static_cast<double>(cand[c] - accepted.back()) / fs;
        if (gap > 1.66 * rr_avg) {
          // Search back for a missed beat between the last QRS and this one.
          std::size_t best = 0;
          double best_val = 0.5 * thr1;
          bool found = false;
          for (std::size_t k = last_accepted_cand + 1; k < c; ++k) {
            if (mwi[cand[k]] > best_val &&
                cand[k] - accepted.back() >= refractory && cand[c] - cand[k] >= refractory) {
              best = k;
              best_val = mwi[cand[k]];
              found = true;
            }
          }
          if (found) {
            accepted.push_back(cand[best]);
            spki = 0.25 * mwi[cand[best]] + 0.75 * spki;
          }
        }
      }
      if (!accepted.empty()) {
        recent_rr.push_back(static_cast<double>(cand[c] - accepted.back()) / fs);
        if (recent_rr.size() > 8) recent_rr.erase(recent_rr.begin());
      }
      accepted.push_back(cand[c]);
      last_accepted_cand = c;
      have_last = true;
      spki = 0.125 * pk + 0.875 * spki;
    } else {
      npki = 0.125 * pk + 0.875 * npki;
    }
  }

  // Locate R in the band-passed signal around each integrator peak.
  const std::size_t search = 2 * half;
  std::vector<std::size_t> r_idx;
  for (std::size_t m : accepted) {
    const std::size_t lo = m >= search ? m - search : 0;
    const std::size_t hi = std::min(n, m + search + 1);
    const std::size_t r = argmax(x, lo, hi);
    if (!r_idx.empty() && r - r_idx.back() < refractory) {
      if (x[r] > x[r_idx.back()]) r_idx.back() = r;
      continue;
    }
    r_idx.push_back(r);
  }
  if (r_idx.empty()) throw InvalidArgument("no QRS detected");
  std::vector<double> times;
  times.reserve(r_idx.size());
  for (std::size_t r : r_idx)
    times.push_back(ecg.t0 + (static_cast<double>(r) + parabolic_offset(x, r)) / fs);
  return make_rr_series(std::move(r_idx), std::move(times));
}

}  // namespace potp::dsp

#endif  // POTP_DSP_ECG_HPP_
