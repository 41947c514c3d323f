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

#ifndef POTP_DSP_LANDMARKS_HPP_
#define POTP_DSP_LANDMARKS_HPP_

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "potp/core/text.hpp"
#include "potp/dsp/ecg.hpp"
#include "potp/dsp/ppg.hpp"
#include "potp/dsp/resp.hpp"
#include "potp/spectral/psd.hpp"

namespace potp::dsp {

using Landmark = std::pair<double, std::string>;

inline std::vector<Landmark> landmarks(const RRSeries& rr) {
  std::vector<Landmark> out;
  for (double t : rr.peak_times_s) out.emplace_back(t, "R");
  return out;
}

inline std::vector<Landmark> landmarks(const RespCycles& rc) {
  std::vector<Landmark> out;
  for (const auto& c : rc.cycles) {
    out.emplace_back(c.onset_s, "breath_onset");
    out.emplace_back(c.insp_end_s, "insp_end");
  }
  if (!rc.cycles.empty()) out.emplace_back(rc.cycles.back().exp_end_s, "breath_onset");
  return out;
}

inline std::vector<Landmark> landmarks(const PpgPulses& pp) {
  std::vector<Landmark> out;
  for (const auto& p : pp.pulses) {
    out.emplace_back(p.foot_s, "foot");
    out.emplace_back(p.peak_s, "systolic_peak");
    out.emplace_back(p.reflected_s, "reflected_wave");
  }
  return out;
}

/// Debug dump: header `time_s,landmark_type`, rows sorted by time.
inline std::string landmarks_csv(std::vector<Landmark> marks) {
  std::stable_sort(marks.begin(), marks.end(),
                   [](const Landmark& a, const Landmark& b) { return a.first < b.first; });
  std::string out = "time_s,landmark_type\n";
  for (const auto& [t, type] : marks) out += format_double(t) + "," + type + "\n";
  return out;
}

}  // namespace potp::dsp

namespace potp::spectral {

/// Debug dump: header `freq_hz,power`.
inline std::string psd_csv(const PsdEstimate& psd) {
  std::string out = "freq_hz,power\n";
  for (std::size_t i = 0; i < psd.freqs_hz.size(); ++i)
    out += format_double(psd.freqs_hz[i]) + "," + format_double(psd.power[i]) + "\n";
  return out;
}

}  // namespace potp::spectral

#endif  // POTP_DSP_LANDMARKS_HPP_
