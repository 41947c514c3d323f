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

#ifndef POTP_DSP_RESP_HPP_
#define POTP_DSP_RESP_HPP_

#include <vector>

#include "potp/dsp/filter.hpp"
#include "potp/dsp/peaks.hpp"
#include "potp/numeric.hpp"

namespace potp::dsp {

/// One breath: inspiration from onset (trough) to insp_end (peak), expiration
/// from insp_end to exp_end (next trough).
struct RespCycle {
  double onset_s;
  double insp_end_s;
  double exp_end_s;

  double insp_time() const { return insp_end_s - onset_s; }
  double exp_time() const { return exp_end_s - insp_end_s; }
  double period() const { return exp_end_s - onset_s; }
  double rate_bpm() const { return 60.0 / period(); }
};

struct RespCycles {
  std::vector<RespCycle> cycles;
  /// Band-passed signal the landmarks were found on.
  SignalChannel filtered;
};

inline constexpr double kRespLowHz = 0.05;
inline constexpr double kRespHighHz = 1.0;
// Landmarks are refined on a wider band; fast, asymmetric breaths lose
// their shape above 1 Hz.
inline constexpr double kRespRefineHz = 4.0;

/// Alternating trough/peak landmarks of a zero-mean oscillation, using
/// hysteresis crossings at +-h to segment half-cycles. Returned as indices
/// with is_peak flags, troughs and peaks strictly alternating.
inline std::vector<std::pair<std::size_t, bool>> alternating_extrema(std::span<const double> x,
                                                                     double h) {
  // Crossing list: (index, upward?)
  std::vector<std::pair<std::size_t, bool>> crossings;
  int state = 0;  // -1 below -h, +1 above +h
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] > h && state != 1) {
      if (state == -1) crossings.emplace_back(i, true);
      state = 1;
    } else if (x[i] < -h && state != -1) {
      if (state == 1) crossings.emplace_back(i, false);
      state = -1;
    }
  }
  std::vector<std::pair<std::size_t, bool>> extrema;
  for (std::size_t c = 0; c + 1 < crossings.size(); ++c) {
    const auto [a, up] = crossings[c];
    const std::size_t b = crossings[c + 1].first;
    if (up)
      extrema.emplace_back(argmax(x, a, b), true);
    else
      extrema.emplace_back(argmin(x, a, b), false);
  }
  return extrema;
}

/// Band-pass 0.05-1 Hz, trough/peak delineation, edge breaths dropped.
inline RespCycles detect_resp_cycles(const SignalChannel& rsp) {
  RespCycles out;
  out.filtered = bandpass(rsp, kRespLowHz, kRespHighHz);
  const auto& x = out.filtered.samples;
  if (is_flat(x, rsp.samples)) throw InvalidArgument("insufficient cycles");
  const double h = 0.25 * stddev(x);
  const auto extrema = alternating_extrema(x, h);

  const double hi = std::min(kRespRefineHz, 0.45 * rsp.fs);
  const auto wide = hi > kRespHighHz ? bandpass(rsp, kRespLowHz, hi).samples : x;
  // Extremum of the wide-band signal between the midpoints to the neighbouring landmarks.
  auto refine = [&](std::size_t k) {
    const std::size_t i = extrema[k].first;
    const std::size_t lo = k > 0 ? (extrema[k - 1].first + i) / 2 : i;
    const std::size_t up = k + 1 < extrema.size() ? (i + extrema[k + 1].first) / 2 : i;
    return extrema[k].second ? argmax(wide, lo, up + 1) : argmin(wide, lo, up + 1);
  };
  auto time_of = [&](std::size_t k) {
    const std::size_t i = refine(k);
    return rsp.t0 + (static_cast<double>(i) + parabolic_offset(wide, i)) / rsp.fs;
  };
  std::vector<RespCycle> cycles;
  for (std::size_t k = 0; k + 2 < extrema.size(); ++k) {
    if (extrema[k].second) continue;  // cycles start at troughs
    const RespCycle c{time_of(k), time_of(k + 1), time_of(k + 2)};
    if (c.onset_s < c.insp_end_s && c.insp_end_s < c.exp_end_s) cycles.push_back(c);
  }
  if (cycles.size() >= 2) cycles = {cycles.begin() + 1, cycles.end() - 1};
  if (cycles.size() < 2) throw InvalidArgument("insufficient cycles");
  out.cycles = std::move(cycles);
  return out;
}

}  // namespace potp::dsp

#endif  // POTP_DSP_RESP_HPP_
