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

#ifndef POTP_FEATURES_MATRIX_BUILDER_HPP_
#define POTP_FEATURES_MATRIX_BUILDER_HPP_

#include <algorithm>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "potp/core/feature_matrix.hpp"
#include "potp/core/types.hpp"
#include "potp/dsp/ecg.hpp"
#include "potp/dsp/eda.hpp"
#include "potp/dsp/filter.hpp"
#include "potp/dsp/ppg.hpp"
#include "potp/dsp/resp.hpp"
#include "potp/error.hpp"
#include "potp/features/extract.hpp"
#include "potp/features/registry.hpp"
#include "potp/features/window.hpp"
#include "potp/parallel.hpp"

namespace potp::features {

inline constexpr double kSktLowpassHz = 0.1;

struct BuildOptions {
  double window_len_s = kDefaultWindowS;
  int threads = 1;
};

/// Whole-record preprocessing of one session. A modality that is missing or
/// fails delineation is left empty and its features become NaN.
struct PreparedSession {
  const Session* session = nullptr;
  std::optional<SignalChannel> skt;
  std::optional<dsp::EdaComponents> eda;
  std::optional<dsp::RespCycles> rsp;
  std::optional<dsp::RRSeries> ecg;
  std::optional<dsp::PpgPulses> ppg;
};

namespace detail {

template <typename F>
auto try_stage(const Session& s, Modality m, F&& fn)
    -> std::optional<decltype(fn(std::declval<const SignalChannel&>()))> {
  const SignalChannel* ch = s.channel(m);
  if (ch == nullptr) {
    warn(s.subject_id + ": no " + std::string(to_string(m)) + " channel; features set to NaN");
    return std::nullopt;
  }
  try {
    return fn(*ch);
  } catch (const Error& e) {
    warn(s.subject_id + ": " + std::string(to_string(m)) + " preprocessing failed (" + e.what() +
         "); features set to NaN");
    return std::nullopt;
  }
}

inline PreparedSession prepare_session(const Session& s) {
  PreparedSession p;
  p.session = &s;
  p.skt = try_stage(s, Modality::SKT, [](const SignalChannel& ch) {
    return kSktLowpassHz < 0.45 * ch.fs ? dsp::lowpass(ch, kSktLowpassHz) : ch;
  });
  p.eda = try_stage(s, Modality::EDA, [](const SignalChannel& ch) { return dsp::decompose_eda(ch); });
  p.rsp = try_stage(s, Modality::RSP, [&](const SignalChannel& ch) {
    try {
      return dsp::detect_resp_cycles(ch);
    } catch (const Error&) {
      // No usable breaths (e.g. apnea): keep the spectral path alive.
      return dsp::RespCycles{{}, dsp::bandpass(ch, dsp::kRespLowHz, dsp::kRespHighHz)};
    }
  });
  p.ecg = try_stage(s, Modality::ECG, [](const SignalChannel& ch) { return dsp::detect_r_peaks(ch); });
  p.ppg = try_stage(s, Modality::PPG, [](const SignalChannel& ch) { return dsp::delineate_ppg(ch); });
  return p;
}

inline void fill_nan(FeatureValues& out, const std::string& group) {
  for (const auto& info : feature_registry())
    if (info.group == group) out[info.name] = kNaN;
}

template <typename Fn>
void extract_group(FeatureValues& out, const std::string& group, bool available, Fn&& fn) {
  if (!available) {
    fill_nan(out, group);
    return;
  }
  try {
    for (auto& [k, v] : fn()) out[k] = v;
  } catch (const Error&) {
    fill_nan(out, group);
  }
}

}  // namespace detail

/// All registry features of one window, keyed by name.
inline FeatureValues extract_window(const PreparedSession& p, const Window& w) {
  FeatureValues out;
  detail::extract_group(out, "SKT", p.skt.has_value(), [&] { return extract_skt_features(w, *p.skt); });
  detail::extract_group(out, "EDA", p.eda.has_value(), [&] { return extract_eda_features(w, *p.eda); });
  detail::extract_group(out, "RSP", p.rsp.has_value(),
                        [&] { return extract_rsp_features(w, *p.rsp, p.rsp->filtered); });
  detail::extract_group(out, "ECG", p.ecg.has_value(), [&] { return extract_ecg_features(w, *p.ecg); });
  detail::extract_group(out, "PPG", p.ppg.has_value(), [&] { return extract_ppg_features(w, *p.ppg); });
  return out;
}

/// One row per window across all sessions, columns in registry order, rows
/// ordered by (subject_id, segment_index, window_index).
inline FeatureMatrix build_feature_matrix(const std::vector<Session>& sessions,
                                          const BuildOptions& opt = {}) {
  std::set<std::string> ids;
  for (const auto& s : sessions)
    if (!ids.insert(s.subject_id).second) throw InvalidArgument("duplicate subject_id: " + s.subject_id);

  std::vector<PreparedSession> prepared(sessions.size());
  parallel_for(sessions.size(), opt.threads,
               [&](std::size_t i) { prepared[i] = detail::prepare_session(sessions[i]); });

  struct Job {
    std::size_t session;
    Window window;
  };
  std::vector<Job> jobs;
  for (std::size_t i = 0; i < sessions.size(); ++i)
    for (auto& w : segment_windows(sessions[i], opt.window_len_s)) jobs.push_back({i, std::move(w)});
  std::stable_sort(jobs.begin(), jobs.end(), [](const Job& a, const Job& b) {
    return RowKey{a.window.subject_id, a.window.segment_index, a.window.window_index} <
           RowKey{b.window.subject_id, b.window.segment_index, b.window.window_index};
  });

  FeatureMatrix m;
  m.columns = feature_names();
  m.keys.resize(jobs.size());
  m.rows.resize(jobs.size());
  parallel_for(jobs.size(), opt.threads, [&](std::size_t j) {
    const auto& job = jobs[j];
    const auto values = extract_window(prepared[job.session], job.window);
    m.keys[j] = {job.window.subject_id, job.window.segment_index, job.window.window_index};
    auto& row = m.rows[j];
    row.reserve(m.columns.size());
    for (const auto& c : m.columns) {
      const auto it = values.find(c);
      row.push_back(it == values.end() ? kNaN : it->second);
    }
  });
  return m;
}

}  // namespace potp::features

#endif  // POTP_FEATURES_MATRIX_BUILDER_HPP_
