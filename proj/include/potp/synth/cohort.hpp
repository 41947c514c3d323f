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

#ifndef POTP_SYNTH_COHORT_HPP_
#define POTP_SYNTH_COHORT_HPP_

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "potp/core/types.hpp"
#include "potp/error.hpp"
#include "potp/features/registry.hpp"
#include "potp/parallel.hpp"
#include "potp/random.hpp"
#include "potp/synth/signals.hpp"

namespace potp::synth {

/// Planted physiology and time perception for one segment class.
struct ClassPhysiology {
  double rr_mean_s = 0.85;
  double rr_sdnn_s = 0.05;
  double lf_hf_ratio = 1.5;
  double resp_rate_hz = 0.25;
  double insp_frac = 0.42;
  double scl_level_us = 5.0;
  double scl_slope_us_per_s = 0.0;
  double scr_rate_per_min = 2.0;
  double skt_base_c = 33.0;
  double skt_slope_c_per_s = 0.0;
  double ppg_rise_frac = 0.18;     // rise time as a fraction of the pulse period
  double ppg_reflect_frac = 0.45;  // reflected-wave position within the decay
  double t_rel_mean = 0.0;
  double t_rel_sd = 0.0;
};

struct NoiseLevels {
  double ecg = 0.02;
  double ppg = 0.01;
  double eda_us = 0.005;
  double skt_c = 0.01;
  double rsp = 0.02;
  double rr_jitter_s = 0.005;
  double breath_jitter = 0.03;  // relative sd of each breath period
};

struct PhysioProfile {
  std::map<SegmentClass, ClassPhysiology> by_class;
  NoiseLevels noise;
  double lf_hz = 0.1;
  double pulse_transit_s = 0.18;
  double lead_s = 30.0;  // recording before the first and after the last segment

  const ClassPhysiology& at(SegmentClass c) const {
    const auto it = by_class.find(c);
    if (it == by_class.end()) throw InvalidArgument("profile has no entry for class " + std::string(to_string(c)));
    return it->second;
  }
};

inline void validate(const PhysioProfile& p) {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw InvalidArgument("invalid profile: " + what);
  };
  for (const auto& [c, v] : p.by_class) {
    const std::string k(to_string(c));
    require(v.rr_mean_s > 0.25 && v.rr_mean_s < 2.5, k + " rr_mean_s out of range");
    require(v.rr_sdnn_s >= 0 && v.rr_sdnn_s < 0.3 * v.rr_mean_s, k + " rr_sdnn_s out of range");
    require(v.lf_hf_ratio > 0, k + " lf_hf_ratio must be positive");
    require(v.resp_rate_hz > 0 && v.resp_rate_hz < 1.0, k + " resp_rate_hz out of range");
    require(v.insp_frac > 0 && v.insp_frac < 1, k + " insp_frac must lie in (0, 1)");
    require(v.scl_level_us > 0, k + " scl_level_us must be positive");
    require(v.scr_rate_per_min >= 0, k + " scr_rate_per_min must be non-negative");
    require(v.ppg_rise_frac > 0 && v.ppg_rise_frac < 0.5, k + " ppg_rise_frac out of range");
    require(v.ppg_reflect_frac > 0 && v.ppg_reflect_frac < 1, k + " ppg_reflect_frac must lie in (0, 1)");
    require(v.t_rel_sd >= 0, k + " t_rel_sd must be non-negative");
  }
  const auto& n = p.noise;
  require(n.ecg >= 0 && n.ppg >= 0 && n.eda_us >= 0 && n.skt_c >= 0 && n.rsp >= 0 && n.rr_jitter_s >= 0 &&
              n.breath_jitter >= 0 && n.breath_jitter < 0.3,
          "noise levels must be non-negative");
  require(p.lf_hz > 0 && p.pulse_transit_s >= 0 && p.lead_s >= 0, "timing constants out of range");
}

struct SegmentTruth {
  int index = 0;
  SegmentClass klass = SegmentClass::Rest;
  ClassPhysiology params;
  double t_rel_planted = 0.0;  // before questionnaire quantization
  double t_perceived = 0.0;
};

/// Everything the generator planted, for use as a test oracle.
struct GroundTruth {
  std::vector<double> r_peaks;
  std::vector<BreathCycle> breaths;
  std::vector<PulseBeat> pulses;
  std::vector<double> scr_onsets;
  std::vector<double> scl_clean;  // at the EDA rate, same timing as the channel
  std::vector<SegmentTruth> segments;

  const SegmentTruth& segment(int index) const {
    for (const auto& s : segments)
      if (s.index == index) return s;
    throw InvalidArgument("no ground truth for segment " + std::to_string(index));
  }
};

/// How each registry feature relates to the planted parameters: the name of
/// the driving parameter, or "free" when it has no planted target.
inline std::map<std::string, std::string> feature_truth_status() {
  // Longest matching prefix wins.
  const std::vector<std::pair<std::string, std::string>> rules = {
      {"SKT_", "skt_slope_c_per_s"},
      {"SCL_gradient", "scl_slope_us_per_s"},
      {"SCL_mean", "scl_level_us"},
      {"SCR_power", "scr_rate_per_min"},
      {"RSP_", "resp_rate_hz"},
      {"RSP_InspTime", "insp_frac"},
      {"RSP_ExpTime", "insp_frac"},
      {"RSP_power", "free"},
      {"ECG_RR_mean", "rr_mean_s"},
      {"ECG_RR_median", "rr_mean_s"},
      {"ECG_RR_SDNN", "rr_sdnn_s"},
      {"ECG_RR_T", "rr_sdnn_s"},
      {"ECG_RR_L", "rr_sdnn_s"},
      {"ECG_RR_CSI", "lf_hf_ratio"},
      {"ECG_RR_n", "lf_hf_ratio"},
      {"PPG_PP_", "rr_mean_s"},
      {"PPG_PP_std", "rr_sdnn_s"},
      {"PPG_PP_n", "lf_hf_ratio"},
      {"PPG_PRT", "ppg_rise_frac"},
      {"PPG_PDT", "ppg_rise_frac"},
      {"PPG_PW", "ppg_reflect_frac"},
  };
  std::map<std::string, std::string> out;
  for (const auto& f : features::feature_registry()) {
    std::size_t best = 0;
    std::string status = "free";
    for (const auto& [prefix, param] : rules)
      if (f.name.starts_with(prefix) && prefix.size() > best) best = prefix.size(), status = param;
    out[f.name] = status;
  }
  return out;
}

namespace detail {

/// Segment whose span contains t, or the nearest one outside the protocol.
inline std::size_t segment_at(const std::vector<Segment>& segs, double t) {
  for (std::size_t i = 0; i < segs.size(); ++i)
    if (t < segs[i].end_s) return i;
  return segs.size() - 1;
}

inline double quantize_perceived(double t) {
  return std::clamp(std::round(t / kPerceivedStepS) * kPerceivedStepS, 0.0, kPerceivedMaxS);
}

inline std::vector<double> sample_times(double fs, double duration) {
  std::vector<double> t(static_cast<std::size_t>(std::floor(duration * fs)));
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = static_cast<double>(i) / fs;
  return t;
}

}  // namespace detail

/// Renders one subject. Segment parameters switch at segment boundaries; the
/// lead-in and tail use the first and last segment's parameters.
inline std::pair<Session, GroundTruth> generate_session(const std::string& subject_id,
                                                        const ProtocolTemplate& protocol,
                                                        const PhysioProfile& profile, std::uint64_t seed) {
  validate(profile);
  Session s;
  s.subject_id = subject_id;
  s.segments = protocol.layout(profile.lead_s);
  const double total = s.segments.back().end_s + profile.lead_s;
  GroundTruth gt;
  std::vector<const ClassPhysiology*> par;
  for (const auto& seg : s.segments) par.push_back(&profile.at(seg.klass));
  auto params_at = [&](double t) -> const ClassPhysiology& { return *par[detail::segment_at(s.segments, t)]; };

  // Questionnaire.
  Rng qrng(seed, "questionnaire");
  for (std::size_t i = 0; i < s.segments.size(); ++i) {
    auto& seg = s.segments[i];
    const double t_rel = qrng.normal(par[i]->t_rel_mean, par[i]->t_rel_sd);
    seg.t_perceived = detail::quantize_perceived(seg.t_correct() * (1.0 - t_rel / 100.0));
    seg.vass = static_cast<int>(std::clamp(std::round(qrng.normal(35.0, 15.0)), 0.0, 100.0));
    gt.segments.push_back({seg.index, seg.klass, *par[i], t_rel, *seg.t_perceived});
  }

  // Heart: RR with LF and respiratory (HF) sinusoidal modulation.
  Rng hrng(seed, "heart");
  const double phi_lf = hrng.uniform(0, 2 * std::numbers::pi), phi_hf = hrng.uniform(0, 2 * std::numbers::pi);
  double t = hrng.uniform(0.2, 0.6);
  while (t < total) {
    gt.r_peaks.push_back(t);
    const auto& p = params_at(t);
    const double a_hf = p.rr_sdnn_s * std::sqrt(2.0 / (1.0 + p.lf_hf_ratio));
    const double a_lf = std::sqrt(p.lf_hf_ratio) * a_hf;
    double rr = p.rr_mean_s + a_lf * std::sin(2 * std::numbers::pi * profile.lf_hz * t + phi_lf) +
                a_hf * std::sin(2 * std::numbers::pi * p.resp_rate_hz * t + phi_hf) +
                hrng.normal(0.0, profile.noise.rr_jitter_s);
    t += std::max(rr, 0.3);
  }
  const double fs_ecg = default_sampling_rate(Modality::ECG);
  const auto n_ecg = static_cast<std::size_t>(std::floor(total * fs_ecg));
  auto ecg = ecg_waveform(gt.r_peaks, fs_ecg, n_ecg);
  add_noise(ecg, profile.noise.ecg, hrng);
  s.channels[Modality::ECG] = make_channel(Modality::ECG, fs_ecg, std::move(ecg));

  // PPG pulses follow each beat after the transit delay.
  Rng prng(seed, "ppg");
  for (std::size_t k = 0; k + 1 < gt.r_peaks.size(); ++k) {
    const double foot = gt.r_peaks[k] + profile.pulse_transit_s;
    const double period = gt.r_peaks[k + 1] - gt.r_peaks[k];
    gt.pulses.push_back({foot, period, params_at(foot).ppg_rise_frac * period});
  }
  const double fs_ppg = default_sampling_rate(Modality::PPG);
  std::vector<double> ppg(static_cast<std::size_t>(std::floor(total * fs_ppg)), 0.0);
  for (const auto& b : gt.pulses) {
    PulseShape shape;
    shape.reflect_frac = params_at(b.foot_s).ppg_reflect_frac;
    const std::vector<PulseBeat> one = {b};
    const auto lo = static_cast<std::size_t>(std::max(0.0, std::ceil(b.foot_s * fs_ppg)));
    const auto hi = std::min(ppg.size(), static_cast<std::size_t>(std::ceil((b.foot_s + b.period_s) * fs_ppg)));
    if (lo >= hi) continue;
    const auto w = ppg_waveform(one, fs_ppg, hi - lo, static_cast<double>(lo) / fs_ppg, shape);
    std::copy(w.begin(), w.end(), ppg.begin() + static_cast<std::ptrdiff_t>(lo));
  }
  add_noise(ppg, profile.noise.ppg, prng);
  s.channels[Modality::PPG] = make_channel(Modality::PPG, fs_ppg, std::move(ppg));

  // Respiration.
  Rng rrng(seed, "resp");
  double tb = rrng.uniform(0.0, 2.0);
  while (tb < total) {
    const auto& p = params_at(tb);
    const double period = (1.0 / p.resp_rate_hz) * (1.0 + rrng.normal(0.0, profile.noise.breath_jitter));
    gt.breaths.push_back({tb, tb + p.insp_frac * period, tb + period});
    tb += period;
  }
  const double fs_rsp = default_sampling_rate(Modality::RSP);
  auto rsp = rsp_waveform(gt.breaths, fs_rsp, static_cast<std::size_t>(std::floor(total * fs_rsp)));
  add_noise(rsp, profile.noise.rsp, rrng);
  s.channels[Modality::RSP] = make_channel(Modality::RSP, fs_rsp, std::move(rsp));

  // EDA: tonic level with a per-segment slope about the segment centre plus
  // Poisson-timed phasic responses.
  Rng erng(seed, "eda");
  const double fs_eda = default_sampling_rate(Modality::EDA);
  const auto te = detail::sample_times(fs_eda, total);
  gt.scl_clean.resize(te.size());
  for (std::size_t i = 0; i < te.size(); ++i) {
    const std::size_t k = detail::segment_at(s.segments, te[i]);
    const auto& seg = s.segments[k];
    gt.scl_clean[i] = par[k]->scl_level_us + par[k]->scl_slope_us_per_s * (te[i] - 0.5 * (seg.start_s + seg.end_s));
  }
  // Inhomogeneous Poisson process by thinning at the largest class rate.
  double max_rate = 0.0;
  for (const auto* q : par) max_rate = std::max(max_rate, q->scr_rate_per_min / 60.0);
  std::vector<double> scr_amp;
  for (double ts = 0.0; max_rate > 0.0;) {
    ts += erng.exponential(max_rate);
    if (ts >= total) break;
    const double keep = params_at(ts).scr_rate_per_min / 60.0 / max_rate;
    const double amp = erng.uniform(0.1, 0.4);
    if (erng.uniform() >= keep) continue;
    gt.scr_onsets.push_back(ts);
    scr_amp.push_back(amp);
  }
  std::vector<double> eda = gt.scl_clean;
  for (std::size_t k = 0; k < gt.scr_onsets.size(); ++k) {
    const auto lo = static_cast<std::size_t>(std::ceil(gt.scr_onsets[k] * fs_eda));
    const auto hi = std::min(eda.size(), lo + static_cast<std::size_t>(30.0 * fs_eda));
    for (std::size_t i = lo; i < hi; ++i) eda[i] += scr_amp[k] * scr_kernel(te[i] - gt.scr_onsets[k]);
  }
  add_noise(eda, profile.noise.eda_us, erng);
  s.channels[Modality::EDA] = make_channel(Modality::EDA, fs_eda, std::move(eda));

  // Skin temperature.
  Rng srng(seed, "skt");
  const double fs_skt = default_sampling_rate(Modality::SKT);
  const auto tk = detail::sample_times(fs_skt, total);
  std::vector<double> skt(tk.size());
  for (std::size_t i = 0; i < tk.size(); ++i) {
    const std::size_t k = detail::segment_at(s.segments, tk[i]);
    const auto& seg = s.segments[k];
    skt[i] = par[k]->skt_base_c + par[k]->skt_slope_c_per_s * (tk[i] - 0.5 * (seg.start_s + seg.end_s));
  }
  add_noise(skt, profile.noise.skt_c, srng);
  s.channels[Modality::SKT] = make_channel(Modality::SKT, fs_skt, std::move(skt));

  validate(s);
  return {std::move(s), std::move(gt)};
}

enum class Scenario { PaperLike, Separable, Null };

inline std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::PaperLike: return "paper_like";
    case Scenario::Separable: return "separable";
    case Scenario::Null: return "null";
  }
  return "?";
}

inline Scenario scenario_from_string(const std::string& s) {
  for (auto v : {Scenario::PaperLike, Scenario::Separable, Scenario::Null})
    if (to_string(v) == s) return v;
  throw InvalidArgument("unknown scenario '" + s + "' (expected paper_like, separable or null)");
}

/// Per-class t_rel targets shared by every scenario.
inline constexpr double kPlantedTRelEmotional = -16.1;
inline constexpr double kPlantedTRelNeutral = 6.94;
inline constexpr double kPlantedTRelCognitive = 23.6;
inline constexpr double kPlantedTRelSd = 15.0;
// Rest segments carry a wide, centred spread. With only tight task clusters
// the sign-split moment fit yields crossed thresholds.
inline constexpr double kRestTRelSd = 100.0;

/// Scenario template before per-subject variation.
inline PhysioProfile scenario_profile(Scenario sc) {
  PhysioProfile p;
  ClassPhysiology base;
  ClassPhysiology emo = base, cog = base, neu = base, rest = base;
  switch (sc) {
    case Scenario::PaperLike:
      emo.rr_mean_s = 0.83, emo.rr_sdnn_s = 0.048, emo.lf_hf_ratio = 1.7, emo.resp_rate_hz = 0.26;
      emo.insp_frac = 0.41, emo.scl_level_us = 5.2, emo.scl_slope_us_per_s = 0.001, emo.scr_rate_per_min = 2.5;
      emo.skt_base_c = 32.95, emo.skt_slope_c_per_s = -0.0002;
      cog.rr_mean_s = 0.82, cog.rr_sdnn_s = 0.047, cog.lf_hf_ratio = 1.8, cog.resp_rate_hz = 0.27;
      cog.insp_frac = 0.40, cog.scl_level_us = 5.4, cog.scl_slope_us_per_s = 0.0015, cog.scr_rate_per_min = 3;
      cog.skt_base_c = 32.9, cog.skt_slope_c_per_s = -0.0003;
      break;
    case Scenario::Separable:
      neu.rr_mean_s = 0.95, neu.resp_rate_hz = 0.20, neu.scl_level_us = 3.0, neu.skt_base_c = 34.0;
      neu.insp_frac = 0.45, neu.scr_rate_per_min = 1;
      emo.rr_mean_s = 0.75, emo.resp_rate_hz = 0.30, emo.scl_level_us = 8.0, emo.skt_base_c = 33.0;
      emo.scl_slope_us_per_s = 0.01, emo.insp_frac = 0.38, emo.scr_rate_per_min = 5;
      cog.rr_mean_s = 0.60, cog.resp_rate_hz = 0.42, cog.scl_level_us = 13.0, cog.skt_base_c = 32.0;
      cog.scl_slope_us_per_s = 0.02, cog.insp_frac = 0.32, cog.scr_rate_per_min = 9;
      rest = neu;
      break;
    case Scenario::Null: break;
  }
  neu.t_rel_mean = kPlantedTRelNeutral;
  emo.t_rel_mean = kPlantedTRelEmotional;
  cog.t_rel_mean = kPlantedTRelCognitive;
  rest.t_rel_mean = 0.0;
  for (auto* c : {&neu, &emo, &cog}) c->t_rel_sd = kPlantedTRelSd;
  rest.t_rel_sd = kRestTRelSd;
  p.by_class = {{SegmentClass::Rest, rest},
                {SegmentClass::Neutral, neu},
                {SegmentClass::Emotional, emo},
                {SegmentClass::Cognitive, cog}};
  return p;
}

/// Subject-level variation applied to every class alike, so it shifts a
/// subject's baseline without changing class contrasts.
inline PhysioProfile subject_profile(const PhysioProfile& tmpl, Scenario sc, Rng& rng) {
  const double spread = sc == Scenario::Separable ? 0.3 : 1.0;
  const double rr = 1.0 + spread * rng.normal(0.0, 0.06);
  const double resp = 1.0 + spread * rng.normal(0.0, 0.08);
  const double scl = spread * rng.normal(0.0, 1.5);
  const double skt = spread * rng.normal(0.0, 0.5);
  const double sdnn = 1.0 + spread * rng.normal(0.0, 0.15);
  const double lf_hf = 1.0 + spread * rng.normal(0.0, 0.2);
  const double scr = 1.0 + spread * rng.normal(0.0, 0.3);
  const double insp = spread * rng.normal(0.0, 0.02);
  const double scl_slope = spread * rng.normal(0.0, 0.002);
  const double skt_slope = spread * rng.normal(0.0, 0.0003);
  PhysioProfile p = tmpl;
  for (auto& [c, v] : p.by_class) {
    v.rr_mean_s *= std::clamp(rr, 0.8, 1.2);
    v.resp_rate_hz *= std::clamp(resp, 0.75, 1.25);
    v.scl_level_us = std::max(0.5, v.scl_level_us + scl);
    v.skt_base_c += skt;
    v.rr_sdnn_s *= std::clamp(sdnn, 0.6, 1.4);
    v.lf_hf_ratio *= std::clamp(lf_hf, 0.5, 1.5);
    v.scr_rate_per_min *= std::clamp(scr, 0.3, 1.7);
    v.insp_frac = std::clamp(v.insp_frac + insp, 0.3, 0.5);
    v.scl_slope_us_per_s += scl_slope;
    v.skt_slope_c_per_s += skt_slope;
  }
  return p;
}

inline std::string subject_name(std::size_t i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "S%02zu", i + 1);
  return buf;
}

struct Cohort {
  std::vector<Session> sessions;
  std::vector<GroundTruth> truths;
};

/// Sessions for n subjects; subject i draws from streams derived from
/// (seed, i), so the cohort does not depend on the thread count.
inline Cohort generate_cohort_with_truth(std::size_t n_subjects, Scenario sc, std::uint64_t seed, int threads = 1,
                                         const ProtocolTemplate& protocol = default_protocol()) {
  Cohort c;
  c.sessions.resize(n_subjects);
  c.truths.resize(n_subjects);
  const PhysioProfile tmpl = scenario_profile(sc);
  parallel_for(n_subjects, threads, [&](std::size_t i) {
    Rng rng(seed, "subject-profile", i);
    auto [s, gt] = generate_session(subject_name(i), protocol, subject_profile(tmpl, sc, rng),
                                    derive_seed(seed, "subject", i));
    c.sessions[i] = std::move(s);
    c.truths[i] = std::move(gt);
  });
  return c;
}

inline std::vector<Session> generate_cohort(std::size_t n_subjects, Scenario sc, std::uint64_t seed,
                                            int threads = 1) {
  return generate_cohort_with_truth(n_subjects, sc, seed, threads).sessions;
}

}  // namespace potp::synth

#endif  // POTP_SYNTH_COHORT_HPP_
