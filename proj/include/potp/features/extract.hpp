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

#ifndef POTP_FEATURES_EXTRACT_HPP_
#define POTP_FEATURES_EXTRACT_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "potp/dsp/ecg.hpp"
#include "potp/dsp/eda.hpp"
#include "potp/dsp/ppg.hpp"
#include "potp/dsp/resp.hpp"
#include "potp/features/window.hpp"
#include "potp/numeric.hpp"
#include "potp/spectral/psd.hpp"

namespace potp::features {

/// Partial feature vector produced by one extractor.
using FeatureValues = std::map<std::string, double>;

inline constexpr double kMaxWelchSegmentS = 30.0;
inline constexpr double kIntervalResampleHz = 4.0;
inline constexpr spectral::Band kVlf{0.003, 0.04};
inline constexpr spectral::Band kLf{0.04, 0.15};
inline constexpr spectral::Band kHf{0.15, 0.4};
inline constexpr spectral::Band kIntervalNorm{0.003, 0.4};
inline constexpr spectral::Band kRspNorm{0.0, 1.0};
inline constexpr double kDegenerateAxisS = 1e-9;

namespace detail {

inline void put_ensemble(FeatureValues& out, const std::string& prefix,
                         const std::vector<double>& values, bool valid) {
  out[prefix + "_mean"] = valid ? mean(values) : kNaN;
  out[prefix + "_median"] = valid ? median(values) : kNaN;
  out[prefix + "_std"] = valid ? stddev(values) : kNaN;
}

inline double welch_segment_s(const Window& win) { return std::min(win.len_s, kMaxWelchSegmentS); }

/// Normalised VLF/LF/HF power of an event-interval series (interval values
/// stamped at their end times), after linear resampling to 4 Hz.
inline std::array<double, 3> interval_band_powers(const std::vector<double>& times,
                                                  const std::vector<double>& intervals,
                                                  double max_seg_s) {
  std::array<double, 3> out{kNaN, kNaN, kNaN};
  if (times.size() < 3) return out;
  const double span = times.back() - times.front();
  const auto n = static_cast<std::size_t>(std::floor(span * kIntervalResampleHz)) + 1;
  const double seg_s = std::min(max_seg_s, static_cast<double>(n) / kIntervalResampleHz);
  if (n < 8 || seg_s * kIntervalResampleHz < 8) return out;
  std::vector<double> grid(n);
  for (std::size_t i = 0; i < n; ++i)
    grid[i] = times.front() + static_cast<double>(i) / kIntervalResampleHz;
  const auto resampled = interp_linear(times, intervals, grid);
  const auto psd = spectral::welch_psd(resampled, kIntervalResampleHz, seg_s);
  if (psd.freqs_hz.back() < kIntervalNorm.hi_hz) return out;
  out[0] = spectral::band_power(psd, kVlf, kIntervalNorm);
  out[1] = spectral::band_power(psd, kLf, kIntervalNorm);
  out[2] = spectral::band_power(psd, kHf, kIntervalNorm);
  return out;
}

}  // namespace detail

/// SKT_gradient: least-squares slope over the window. SKT_power: total Welch
/// power after mean removal.
inline FeatureValues extract_skt_features(const Window& win, const SignalChannel& skt) {
  const auto x = skt.slice(win.start_s, win.end_s());
  FeatureValues out;
  out["SKT_gradient"] = ls_slope_uniform(x, 1.0 / skt.fs);
  const auto psd = spectral::welch_psd(x, skt.fs, detail::welch_segment_s(win));
  out["SKT_power"] = spectral::total_power(psd);
  return out;
}

/// SCL gradient and mean; SCR_power as the mean squared phasic driver.
inline FeatureValues extract_eda_features(const Window& win, const dsp::EdaComponents& eda) {
  const SignalChannel scl_ch = eda.scl_channel(), scr_ch = eda.scr_channel();
  const auto scl = scl_ch.slice(win.start_s, win.end_s());
  const auto scr = scr_ch.slice(win.start_s, win.end_s());
  FeatureValues out;
  out["SCL_gradient"] = ls_slope_uniform(scl, 1.0 / eda.fs);
  out["SCL_mean"] = mean(scl);
  out["SCR_power"] = mean_square(scr);
  return out;
}

/// Respiratory features. Time-domain statistics use breaths whose onset lies
/// in the window (NaN with fewer than two). Spectral features use the
/// window's samples of `rsp` (normally the band-passed signal).
inline FeatureValues extract_rsp_features(const Window& win, const dsp::RespCycles& cycles,
                                          const SignalChannel& rsp) {
  FeatureValues out;
  std::vector<double> rate, period, insp, exp;
  for (const auto& c : cycles.cycles) {
    if (c.onset_s < win.start_s || c.onset_s >= win.end_s()) continue;
    rate.push_back(c.rate_bpm());
    period.push_back(c.period());
    insp.push_back(c.insp_time());
    exp.push_back(c.exp_time());
  }
  const bool enough = rate.size() >= 2;
  detail::put_ensemble(out, "RSP_Rate", rate, enough);
  detail::put_ensemble(out, "RSP_Prd", period, enough);
  detail::put_ensemble(out, "RSP_InspTime", insp, enough);
  detail::put_ensemble(out, "RSP_ExpTime", exp, enough);

  const auto x = rsp.slice(win.start_s, win.end_s());
  const auto psd = spectral::welch_psd(x, rsp.fs, detail::welch_segment_s(win));
  for (int k = 0; k < 4; ++k) {
    const spectral::Band b{0.25 * k, 0.25 * (k + 1)};
    out["RSP_PSD_" + std::to_string(k + 1)] = spectral::band_power(psd, b);
    out["RSP_nPSD_" + std::to_string(k + 1)] = spectral::band_power(psd, b, kRspNorm);
  }
  const double width = (0.6 - 0.08) / 5.0;
  for (int k = 0; k < 5; ++k) {
    const spectral::Band b{0.08 + width * k, 0.08 + width * (k + 1)};
    out["RSP_pBF_" + std::to_string(k + 1)] = spectral::band_power(psd, b, kRspNorm);
  }
  try {
    out["RSP_F1pond"] = spectral::gaussian_peak_fit(psd, 0.15, 0.5);
  } catch (const InvalidArgument&) {
    out["RSP_F1pond"] = kNaN;
  }

  // Lomb-Scargle peak on the window decimated to about 4 Hz (the signal is
  // already band-limited to 1 Hz).
  const auto step = std::max<std::size_t>(1, static_cast<std::size_t>(rsp.fs / 4.0));
  const auto first = rsp.index_range(win.start_s, win.end_s()).first;
  std::vector<double> t, v;
  for (std::size_t i = 0; i < x.size(); i += step) {
    t.push_back(rsp.time_of(first + i));
    v.push_back(x[i]);
  }
  const auto grid = spectral::frequency_grid(0.05, 1.0, 0.005);
  out["RSP_Pk"] = t.size() >= spectral::kLombMinSamples
                      ? spectral::peak_frequency(spectral::lomb_psd(t, v, grid), 0.05, 1.0)
                      : kNaN;
  const double m = mean(x);
  double ss = 0.0;
  for (double s : x) ss += (s - m) * (s - m);
  out["RSP_power"] = ss / static_cast<double>(x.size());
  return out;
}

/// Poincare descriptors of an RR sequence (population variances).
struct Poincare {
  double sd1, sd2;
};

inline Poincare poincare(const std::vector<double>& rr) {
  const auto d = diff(rr);
  const double var_d = variance(d);
  const double sd1 = std::sqrt(0.5 * var_d);
  const double sd2 = std::sqrt(std::max(0.0, 2.0 * variance(rr) - 0.5 * var_d));
  return {sd1, sd2};
}

/// HRV features from plausible RR intervals ending inside the window. All NaN
/// with fewer than three intervals.
inline FeatureValues extract_ecg_features(const Window& win, const dsp::RRSeries& rr) {
  std::vector<double> values, times;
  for (std::size_t i = 0; i < rr.rr_s.size(); ++i) {
    const double t_end = rr.peak_times_s[i + 1];
    if (t_end < win.start_s || t_end >= win.end_s() || rr.implausible[i]) continue;
    values.push_back(rr.rr_s[i]);
    times.push_back(t_end);
  }
  FeatureValues out;
  const bool enough = values.size() >= 3;
  out["ECG_RR_mean"] = enough ? mean(values) : kNaN;
  out["ECG_RR_median"] = enough ? median(values) : kNaN;
  out["ECG_RR_SDNN"] = enough ? stddev(values) : kNaN;
  const auto bands = enough ? detail::interval_band_powers(times, values, detail::welch_segment_s(win))
                            : std::array<double, 3>{kNaN, kNaN, kNaN};
  out["ECG_RR_nVLF"] = bands[0];
  out["ECG_RR_nLF"] = bands[1];
  out["ECG_RR_nHF"] = bands[2];
  if (enough) {
    const auto pc = poincare(values);
    const double t = 4.0 * pc.sd1, l = 4.0 * pc.sd2;
    out["ECG_RR_T"] = t;
    out["ECG_RR_L"] = l;
    // A transverse axis at rounding level means a degenerate scatter.
    const bool degenerate = !(t > kDegenerateAxisS);
    out["ECG_RR_CSI"] = degenerate ? kNaN : l / t;
    out["ECG_RR_CSI_modified"] = degenerate ? kNaN : l * l / t;
  } else {
    for (const char* k : {"ECG_RR_T", "ECG_RR_L", "ECG_RR_CSI", "ECG_RR_CSI_modified"}) out[k] = kNaN;
  }
  return out;
}

/// Pulse ensemble statistics over pulses whose foot lies in the window, plus
/// the RR-style frequency analysis of the pulse-period series. All NaN with
/// fewer than three pulses.
inline FeatureValues extract_ppg_features(const Window& win, const dsp::PpgPulses& ppg) {
  std::vector<double> pp, prt, pdt, pw, times;
  for (const auto& p : ppg.pulses) {
    if (p.foot_s < win.start_s || p.foot_s >= win.end_s()) continue;
    pp.push_back(p.pp());
    prt.push_back(p.prt());
    pdt.push_back(p.pdt());
    pw.push_back(p.pw());
    times.push_back(p.next_foot_s);
  }
  FeatureValues out;
  const bool enough = pp.size() >= 3;
  detail::put_ensemble(out, "PPG_PP", pp, enough);
  detail::put_ensemble(out, "PPG_PRT", prt, enough);
  detail::put_ensemble(out, "PPG_PDT", pdt, enough);
  detail::put_ensemble(out, "PPG_PW", pw, enough);
  const auto bands = enough ? detail::interval_band_powers(times, pp, detail::welch_segment_s(win))
                            : std::array<double, 3>{kNaN, kNaN, kNaN};
  out["PPG_PP_nVLF"] = bands[0];
  out["PPG_PP_nLF"] = bands[1];
  out["PPG_PP_nHF"] = bands[2];
  return out;
}

}  // namespace potp::features

#endif  // POTP_FEATURES_EXTRACT_HPP_
