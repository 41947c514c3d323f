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

#ifndef POTP_SYNTH_SIGNALS_HPP_
#define POTP_SYNTH_SIGNALS_HPP_

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "potp/core/types.hpp"
#include "potp/random.hpp"

// Waveform primitives with known landmarks. Each function renders n samples at
// times t0 + i / fs.

namespace potp::synth {

struct GaussianWave {
  double amplitude;
  double offset_s;  // relative to the R peak
  double width_s;   // standard deviation
};

/// P-Q-R-S-T as Gaussian bumps; Q and S are symmetric about R so the R
/// maximum stays at the beat time.
inline std::vector<GaussianWave> default_beat_shape() {
  return {{0.10, -0.18, 0.025}, {-0.15, -0.03, 0.008}, {1.0, 0.0, 0.010},
          {-0.15, 0.03, 0.008}, {0.25, 0.25, 0.040}};
}

inline std::vector<double> ecg_waveform(std::span<const double> beat_times, double fs,
                                        std::size_t n, double t0 = 0.0,
                                        const std::vector<GaussianWave>& shape = default_beat_shape()) {
  std::vector<double> x(n, 0.0);
  for (double tb : beat_times) {
    for (const auto& w : shape) {
      const double centre = tb + w.offset_s;
      const double reach = 5.0 * w.width_s;
      const double lo = std::max(0.0, std::ceil((centre - reach - t0) * fs));
      const double hi = std::min(static_cast<double>(n), std::floor((centre + reach - t0) * fs) + 1);
      for (auto i = static_cast<std::size_t>(lo); static_cast<double>(i) < hi; ++i) {
        const double d = (t0 + static_cast<double>(i) / fs - centre) / w.width_s;
        x[i] += w.amplitude * std::exp(-0.5 * d * d);
      }
    }
  }
  return x;
}

/// Beat times from an RR sequence, starting at `first`.
inline std::vector<double> beats_from_rr(double first, std::span<const double> rr) {
  std::vector<double> t{first};
  for (double r : rr) t.push_back(t.back() + r);
  return t;
}

struct BreathCycle {
  double onset_s;
  double insp_end_s;
  double exp_end_s;
};

/// Breaths of constant period and inspiratory fraction covering [t_start, t_end].
inline std::vector<BreathCycle> regular_breaths(double t_start, double t_end, double rate_hz,
                                                double insp_frac) {
  std::vector<BreathCycle> out;
  const double period = 1.0 / rate_hz;
  for (double t = t_start; t < t_end; t += period)
    out.push_back({t, t + insp_frac * period, t + period});
  return out;
}

/// Half-cosine rise from -amplitude to +amplitude during inspiration and
/// half-cosine fall during expiration. Outside all cycles the value is -amplitude.
inline std::vector<double> rsp_waveform(std::span<const BreathCycle> cycles, double fs,
                                        std::size_t n, double t0 = 0.0, double amplitude = 1.0) {
  std::vector<double> x(n, -amplitude);
  std::size_t c = 0;
  for (std::size_t i = 0; i < n && !cycles.empty(); ++i) {
    const double t = t0 + static_cast<double>(i) / fs;
    while (c + 1 < cycles.size() && t >= cycles[c].exp_end_s) ++c;
    const BreathCycle& b = cycles[c];
    if (t < b.onset_s || t >= b.exp_end_s) continue;
    if (t < b.insp_end_s) {
      const double u = (t - b.onset_s) / (b.insp_end_s - b.onset_s);
      x[i] = -amplitude * std::cos(std::numbers::pi * u);
    } else {
      const double u = (t - b.insp_end_s) / (b.exp_end_s - b.insp_end_s);
      x[i] = amplitude * std::cos(std::numbers::pi * u);
    }
  }
  return x;
}

/// Normalised pulse: quarter-sine rise over `rise_s`, raised-cosine decay to
/// the next foot with a windowed Gaussian reflected wave centred at
/// `reflect_frac` of the decay.
struct PulseShape {
  double reflect_amplitude = 0.2;
  double reflect_frac = 0.4;
  double reflect_width = 0.06;

  double decay(double u) const {
    const double g = (u - reflect_frac) / reflect_width;
    return 0.5 * (1.0 + std::cos(std::numbers::pi * u)) +
           reflect_amplitude * std::exp(-0.5 * g * g) * std::sin(std::numbers::pi * u);
  }

  /// Fraction of the decay phase at which the reflected wave peaks.
  double reflected_peak_frac() const {
    // First local minimum after the systolic peak, then the next maximum.
    constexpr int kSteps = 20000;
    double prev = decay(0.0);
    bool notch = false;
    for (int i = 1; i < kSteps; ++i) {
      const double u = static_cast<double>(i) / kSteps;
      const double v = decay(u);
      if (!notch && v > prev) notch = true;
      if (notch && v < prev) return static_cast<double>(i - 1) / kSteps;
      prev = v;
    }
    return reflect_frac;
  }
};

struct PulseBeat {
  double foot_s;
  double period_s;
  double rise_s;
};

inline std::vector<double> ppg_waveform(std::span<const PulseBeat> beats, double fs, std::size_t n,
                                        double t0 = 0.0, const PulseShape& shape = {}) {
  std::vector<double> x(n, 0.0);
  for (const PulseBeat& b : beats) {
    const double lo = std::max(0.0, std::ceil((b.foot_s - t0) * fs));
    const double hi = std::min(static_cast<double>(n), std::ceil((b.foot_s + b.period_s - t0) * fs));
    for (auto i = static_cast<std::size_t>(lo); static_cast<double>(i) < hi; ++i) {
      const double t = t0 + static_cast<double>(i) / fs - b.foot_s;
      if (t < b.rise_s)
        x[i] = std::sin(0.5 * std::numbers::pi * t / b.rise_s);
      else
        x[i] = shape.decay((t - b.rise_s) / (b.period_s - b.rise_s));
    }
  }
  return x;
}

/// Skin-conductance response: bi-exponential with rise/decay time constants.
inline double scr_kernel(double t, double tau_rise = 0.75, double tau_decay = 2.0) {
  if (t < 0.0) return 0.0;
  // Peak-normalised difference of exponentials.
  const double tp = tau_rise * tau_decay / (tau_decay - tau_rise) * std::log(tau_decay / tau_rise);
  const double peak = std::exp(-tp / tau_decay) - std::exp(-tp / tau_rise);
  return (std::exp(-t / tau_decay) - std::exp(-t / tau_rise)) / peak;
}

inline void add_noise(std::vector<double>& x, double sd, Rng& rng) {
  if (sd <= 0.0) return;
  for (double& v : x) v += rng.normal(0.0, sd);
}

inline SignalChannel make_channel(Modality m, double fs, std::vector<double> samples, double t0 = 0.0) {
  return {m, fs, std::move(samples), t0};
}

}  // namespace potp::synth

#endif  // POTP_SYNTH_SIGNALS_HPP_
