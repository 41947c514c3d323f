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

#ifndef POTP_DSP_EDA_HPP_
#define POTP_DSP_EDA_HPP_

#include <vector>

#include "potp/dsp/filter.hpp"

namespace potp::dsp {

inline constexpr double kEdaPrefilterHz = 1.0;
inline constexpr double kSclCutoffHz = 0.05;
inline constexpr int kSclOrder = 4;

/// Tonic/phasic split of skin conductance. scr is defined as filtered - scl,
/// so scl + scr reconstructs the filtered signal up to rounding.
struct EdaComponents {
  std::vector<double> filtered;
  std::vector<double> scl;
  std::vector<double> scr;
  double fs = 0.0;
  double t0 = 0.0;

  SignalChannel scl_channel() const { return {Modality::EDA, fs, scl, t0}; }
  SignalChannel scr_channel() const { return {Modality::EDA, fs, scr, t0}; }
};

/// 1 Hz low-pass (skipped when 1 Hz is too close to Nyquist), then SCL as the
/// zero-phase 0.05 Hz low-pass and SCR as the residual.
inline EdaComponents decompose_eda(const SignalChannel& eda) {
  if (!(eda.fs > 0.0)) throw InvalidArgument("EDA sampling rate must be positive");
  if (eda.fs < 2.0) throw InvalidArgument("EDA sampling rate must be >= 2 Hz");
  EdaComponents out;
  out.fs = eda.fs;
  out.t0 = eda.t0;
  if (kEdaPrefilterHz < 0.45 * eda.fs)
    out.filtered = filtfilt(butter_lowpass(kDefaultOrder, kEdaPrefilterHz, eda.fs), eda.samples);
  else
    out.filtered = eda.samples;
  out.scl = filtfilt(butter_lowpass(kSclOrder, kSclCutoffHz, eda.fs), out.filtered);
  out.scr.resize(out.filtered.size());
  for (std::size_t i = 0; i < out.scr.size(); ++i) out.scr[i] = out.filtered[i] - out.scl[i];
  return out;
}

}  // namespace potp::dsp

#endif  // POTP_DSP_EDA_HPP_
