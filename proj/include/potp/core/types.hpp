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

#ifndef POTP_CORE_TYPES_HPP_
#define POTP_CORE_TYPES_HPP_

#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "potp/error.hpp"

namespace potp {

enum class Modality { ECG, PPG, EDA, SKT, RSP };

inline constexpr std::array<Modality, 5> kAllModalities = {
    Modality::ECG, Modality::PPG, Modality::EDA, Modality::SKT, Modality::RSP};

inline std::string_view to_string(Modality m) {
  switch (m) {
    case Modality::ECG: return "ECG";
    case Modality::PPG: return "PPG";
    case Modality::EDA: return "EDA";
    case Modality::SKT: return "SKT";
    case Modality::RSP: return "RSP";
  }
  return "?";
}

inline Modality modality_from_string(std::string_view s) {
  for (Modality m : kAllModalities)
    if (to_string(m) == s) return m;
  throw FormatError("unknown modality '" + std::string(s) + "'");
}

/// Sampling rates used when a manifest or generator does not specify one.
inline double default_sampling_rate(Modality m) {
  switch (m) {
    case Modality::ECG: return 256.0;
    case Modality::PPG: return 64.0;
    case Modality::EDA: return 4.0;
    case Modality::SKT: return 4.0;
    case Modality::RSP: return 32.0;
  }
  return 0.0;
}

enum class SegmentClass { Rest, Neutral, Emotional, Cognitive };

inline std::string_view to_string(SegmentClass c) {
  switch (c) {
    case SegmentClass::Rest: return "Rest";
    case SegmentClass::Neutral: return "Neutral";
    case SegmentClass::Emotional: return "Emotional";
    case SegmentClass::Cognitive: return "Cognitive";
  }
  return "?";
}

inline SegmentClass segment_class_from_string(std::string_view s) {
  for (auto c : {SegmentClass::Rest, SegmentClass::Neutral, SegmentClass::Emotional,
                 SegmentClass::Cognitive})
    if (to_string(c) == s) return c;
  throw FormatError("unknown segment class '" + std::string(s) + "'");
}

/// Uniformly sampled recording of one modality. Sample i sits at t0 + i / fs.
struct SignalChannel {
  Modality modality = Modality::ECG;
  double fs = 0.0;
  std::vector<double> samples;
  double t0 = 0.0;

  double duration() const { return static_cast<double>(samples.size()) / fs; }
  double time_of(std::size_t i) const { return t0 + static_cast<double>(i) / fs; }

  /// Samples with index in [ceil((start - t0) fs), ceil((end - t0) fs)).
  std::span<const double> slice(double start_s, double end_s) const {
    const auto [first, last] = index_range(start_s, end_s);
    return std::span<const double>(samples).subspan(first, last - first);
  }

  std::pair<std::size_t, std::size_t> index_range(double start_s, double end_s) const {
    const double a = std::ceil((start_s - t0) * fs - 1e-9);
    const double b = std::ceil((end_s - t0) * fs - 1e-9);
    if (a < 0 || b > static_cast<double>(samples.size()) || b < a)
      throw InvalidArgument("window [" + std::to_string(start_s) + ", " +
                            std::to_string(end_s) + ") s lies outside the " +
                            std::string(to_string(modality)) + " channel");
    return {static_cast<std::size_t>(a), static_cast<std::size_t>(b)};
  }
};

inline constexpr double kPerceivedStepS = 30.0;
inline constexpr double kPerceivedMaxS = 300.0;

inline bool is_valid_perceived(double t) {
  if (!(t >= 0.0 && t <= kPerceivedMaxS)) return false;
  const double steps = t / kPerceivedStepS;
  return steps == std::round(steps);
}

struct Segment {
  int index = 0;  // 1-based protocol position
  std::string name;
  SegmentClass klass = SegmentClass::Rest;
  double start_s = 0.0;
  double end_s = 0.0;
  std::optional<double> t_perceived;
  std::optional<int> vass;

  double t_correct() const { return end_s - start_s; }
};

struct Session {
  std::string subject_id;
  std::map<Modality, SignalChannel> channels;
  std::vector<Segment> segments;

  const SignalChannel* channel(Modality m) const {
    auto it = channels.find(m);
    return it == channels.end() ? nullptr : &it->second;
  }
};

/// Checks every Session invariant; throws FormatError naming the violation.
inline void validate(const Session& s) {
  if (s.subject_id.empty()) throw FormatError("empty subject_id");
  if (s.segments.empty()) throw FormatError("empty protocol");
  for (std::size_t i = 0; i < s.segments.size(); ++i) {
    const Segment& seg = s.segments[i];
    const std::string where = "segment " + std::to_string(seg.index);
    if (!(seg.end_s > seg.start_s)) throw FormatError(where + ": end_s must exceed start_s");
    if (i > 0 && seg.start_s < s.segments[i - 1].end_s)
      throw FormatError("segment overlap between segments " +
                        std::to_string(s.segments[i - 1].index) + " and " +
                        std::to_string(seg.index));
    if (seg.t_perceived && !is_valid_perceived(*seg.t_perceived))
      throw FormatError(where + ": t_perceived_s must be one of 0, 30, ..., 300");
    if (seg.vass && (*seg.vass < 0 || *seg.vass > 100))
      throw FormatError(where + ": vass must be in 0..100");
  }
  for (const auto& [m, ch] : s.channels) {
    const std::string name(to_string(m));
    if (ch.modality != m) throw FormatError(name + ": modality mismatch");
    if (!(ch.fs > 0.0)) throw FormatError(name + ": sampling rate must be positive");
    if (ch.samples.empty()) throw FormatError(name + ": channel has no samples");
    for (const Segment& seg : s.segments) {
      const double first = std::floor((seg.start_s - ch.t0) * ch.fs);
      const double last = std::floor((seg.end_s - ch.t0) * ch.fs);
      if (first < 0 || last >= static_cast<double>(ch.samples.size()))
        throw FormatError("channel underruns protocol: " + name + " covers " +
                          std::to_string(ch.t0) + ".." +
                          std::to_string(ch.t0 + ch.duration()) + " s but segment " +
                          std::to_string(seg.index) + " ends at " +
                          std::to_string(seg.end_s) + " s");
    }
  }
}

struct ProtocolEntry {
  std::string name;
  SegmentClass klass;
  double duration_s;
};

struct ProtocolTemplate {
  std::vector<ProtocolEntry> entries;

  double total_duration() const {
    double t = 0.0;
    for (const auto& e : entries) t += e.duration_s;
    return t;
  }

  /// Back-to-back segments starting at `start_s`, without perceived times.
  std::vector<Segment> layout(double start_s = 0.0) const {
    std::vector<Segment> out;
    double t = start_s;
    int index = 1;
    for (const auto& e : entries) {
      if (!(e.duration_s > 0)) throw InvalidArgument("protocol durations must be positive");
      out.push_back({index++, e.name, e.klass, t, t + e.duration_s, std::nullopt, std::nullopt});
      t += e.duration_s;
    }
    return out;
  }
};

/// The nine-segment experimental protocol (19.5 min).
inline ProtocolTemplate default_protocol() {
  using C = SegmentClass;
  return {{{"Relaxation audio", C::Rest, 180.0},
           {"Neutral clip", C::Neutral, 120.0},
           {"Rest", C::Neutral, 120.0},
           {"Fear clip", C::Emotional, 120.0},
           {"Mathematics task", C::Cognitive, 180.0},
           {"Rest", C::Rest, 90.0},
           {"Stroop color test", C::Cognitive, 90.0},
           {"Sadness clip", C::Emotional, 90.0},
           {"Rest", C::Rest, 180.0}}};
}

}  // namespace potp

#endif  // POTP_CORE_TYPES_HPP_
