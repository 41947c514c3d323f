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

#ifndef POTP_DSP_FILTER_HPP_
#define POTP_DSP_FILTER_HPP_

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "potp/core/types.hpp"
#include "potp/error.hpp"

namespace potp::dsp {

/// Second-order section, transposed direct form II, a0 normalized to 1.
struct Biquad {
  double b0, b1, b2, a1, a2;

  double dc_gain() const { return (b0 + b1 + b2) / (1.0 + a1 + a2); }
};

struct SosFilter {
  std::vector<Biquad> sections;

  /// Number of taps of the equivalent direct-form filter.
  std::size_t taps() const { return 2 * sections.size() + 1; }

  /// Minimum signal length accepted by filtfilt.
  std::size_t min_length() const { return 3 * taps() + 1; }

  void append(const SosFilter& other) {
    sections.insert(sections.end(), other.sections.begin(), other.sections.end());
  }
};

namespace detail {

enum class BandType { Lowpass, Highpass };

inline SosFilter butterworth(int order, double fc, double fs, BandType type) {
  if (order < 1) throw InvalidArgument("filter order must be >= 1");
  if (!(fc > 0.0 && fc < fs / 2.0))
    throw InvalidArgument("cutoff " + std::to_string(fc) + " Hz outside (0, Nyquist)");
  const double two_fs = 2.0 * fs;
  const double warped = two_fs * std::tan(std::numbers::pi * fc / fs);
  SosFilter f;
  auto analog_pole = [&](int k) {
    const double angle = std::numbers::pi * (2.0 * k + order + 1) / (2.0 * order);
    const std::complex<double> s = std::polar(1.0, angle);
    return type == BandType::Lowpass ? warped * s : warped / s;
  };
  auto bilinear = [&](std::complex<double> p) { return (two_fs + p) / (two_fs - p); };

  for (int k = 0; k < order / 2; ++k) {
    const std::complex<double> z = bilinear(analog_pole(k));
    Biquad q{};
    q.a1 = -2.0 * z.real();
    q.a2 = std::norm(z);
    if (type == BandType::Lowpass) {
      const double g = (1.0 + q.a1 + q.a2) / 4.0;
      q.b0 = g, q.b1 = 2.0 * g, q.b2 = g;
    } else {
      const double g = (1.0 - q.a1 + q.a2) / 4.0;
      q.b0 = g, q.b1 = -2.0 * g, q.b2 = g;
    }
    f.sections.push_back(q);
  }
  if (order % 2 == 1) {
    const double z = bilinear(analog_pole(order / 2)).real();
    Biquad q{};
    q.a1 = -z;
    q.a2 = 0.0;
    if (type == BandType::Lowpass) {
      const double g = (1.0 + q.a1) / 2.0;
      q.b0 = g, q.b1 = g, q.b2 = 0.0;
    } else {
      const double g = (1.0 - q.a1) / 2.0;
      q.b0 = g, q.b1 = -g, q.b2 = 0.0;
    }
    f.sections.push_back(q);
  }
  return f;
}

/// Causal filtering with each section's state initialised to the steady state
/// of a constant input equal to x[0].
inline void sosfilt_steady(const SosFilter& f, std::vector<double>& x) {
  if (x.empty()) return;
  double level = x.front();
  for (const Biquad& q : f.sections) {
    const double y_ss = q.dc_gain() * level;
    double z2 = q.b2 * level - q.a2 * y_ss;
    double z1 = q.b1 * level - q.a1 * y_ss + z2;
    for (double& v : x) {
      const double in = v;
      const double out = q.b0 * in + z1;
      z1 = q.b1 * in - q.a1 * out + z2;
      z2 = q.b2 * in - q.a2 * out;
      v = out;
    }
    level = y_ss;
  }
}

}  // namespace detail

inline SosFilter butter_lowpass(int order, double fc, double fs) {
  return detail::butterworth(order, fc, fs, detail::BandType::Lowpass);
}

inline SosFilter butter_highpass(int order, double fc, double fs) {
  return detail::butterworth(order, fc, fs, detail::BandType::Highpass);
}

/// Highpass at lo cascaded with lowpass at hi; lo == 0 yields a pure lowpass.
inline SosFilter butter_bandpass(int order, double lo, double hi, double fs) {
  if (!(lo >= 0.0 && lo < hi)) throw InvalidArgument("invalid band: need 0 <= lo < hi");
  if (!(hi < fs / 2.0)) throw InvalidArgument("band outside Nyquist");
  SosFilter f;
  if (lo > 0.0) f = butter_highpass(order, lo, fs);
  f.append(butter_lowpass(order, hi, fs));
  return f;
}

/// Zero-phase forward-backward filtering with odd-extension padding.
inline std::vector<double> filtfilt(const SosFilter& f, std::span<const double> x) {
  const std::size_t n = x.size();
  if (n < f.min_length())
    throw InvalidArgument("signal of " + std::to_string(n) +
                          " samples is shorter than 3x the filter settle length (" +
                          std::to_string(f.taps()) + " taps)");
  const std::size_t pad = 3 * f.taps();
  std::vector<double> ext;
  ext.reserve(n + 2 * pad);
  for (std::size_t i = pad; i >= 1; --i) ext.push_back(2.0 * x[0] - x[i]);
  ext.insert(ext.end(), x.begin(), x.end());
  for (std::size_t i = 1; i <= pad; ++i) ext.push_back(2.0 * x[n - 1] - x[n - 1 - i]);

  detail::sosfilt_steady(f, ext);
  std::reverse(ext.begin(), ext.end());
  detail::sosfilt_steady(f, ext);
  std::reverse(ext.begin(), ext.end());
  return {ext.begin() + static_cast<std::ptrdiff_t>(pad),
          ext.begin() + static_cast<std::ptrdiff_t>(pad + n)};
}

/// Default order of each band edge used by the channel-level helpers.
inline constexpr int kDefaultOrder = 2;

inline SignalChannel bandpass(const SignalChannel& ch, double lo_hz, double hi_hz,
                              int order = kDefaultOrder) {
  if (!(lo_hz >= 0.0 && lo_hz < hi_hz))
    throw InvalidArgument("invalid band [" + std::to_string(lo_hz) + ", " +
                          std::to_string(hi_hz) + "] Hz");
  if (!(hi_hz < ch.fs / 2.0))
    throw InvalidArgument("band outside Nyquist: " + std::to_string(hi_hz) +
                          " Hz >= " + std::to_string(ch.fs / 2.0) + " Hz");
  SignalChannel out = ch;
  out.samples = filtfilt(butter_bandpass(order, lo_hz, hi_hz, ch.fs), ch.samples);
  return out;
}

inline SignalChannel lowpass(const SignalChannel& ch, double fc_hz, int order = kDefaultOrder) {
  SignalChannel out = ch;
  out.samples = filtfilt(butter_lowpass(order, fc_hz, ch.fs), ch.samples);
  return out;
}

}  // namespace potp::dsp

#endif  // POTP_DSP_FILTER_HPP_
