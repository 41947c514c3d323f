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

#ifndef POTP_CORE_SESSION_IO_HPP_
#define POTP_CORE_SESSION_IO_HPP_

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "potp/core/text.hpp"
#include "potp/core/types.hpp"

// On-disk session layout: one JSON manifest plus one single-column CSV per
// channel. Sampling rate and start time live in the manifest.
//
//   {"subject_id": "S01",
//    "channels": [{"modality": "ECG", "fs_hz": 256, "file": "ecg.csv", "t0_s": 0}],
//    "segments": [{"index": 1, "name": "...", "class": "Rest", "start_s": 0,
//                  "end_s": 180, "t_perceived_s": 150, "vass": 20}]}

namespace potp {

namespace detail {

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  out << text;
  if (!out) throw FormatError("I/O failure writing " + path.string());
}

inline std::vector<double> read_channel_csv(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  std::vector<double> values;
  std::size_t line_no = 0, pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    std::string_view line(text.data() + pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (line_no == 1 && line == "value") continue;
    auto v = parse_double(line);
    if (!v)
      throw FormatError(path.string() + ":" + std::to_string(line_no) +
                        ": malformed numeric field '" + std::string(line) + "'");
    values.push_back(*v);
  }
  return values;
}

template <typename T>
T json_field(const nlohmann::json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) throw FormatError(where + ": missing field '" + key + "'");
  const auto& v = obj.at(key);
  if constexpr (std::is_same_v<T, std::string>) {
    if (!v.is_string()) throw FormatError(where + ": field '" + key + "' must be a string");
  } else if constexpr (std::is_integral_v<T>) {
    if (!v.is_number_integer())
      throw FormatError(where + ": malformed numeric field '" + key + "'");
  } else {
    if (!v.is_number()) throw FormatError(where + ": malformed numeric field '" + key + "'");
  }
  return v.get<T>();
}

inline std::string channel_file_name(Modality m) {
  std::string name(to_string(m));
  for (char& c : name) c = static_cast<char>(std::tolower(c));
  return name + ".csv";
}

}  // namespace detail

namespace detail {

inline nlohmann::json read_manifest(const std::filesystem::path& manifest_path) {
  const std::string file = manifest_path.string();
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_text_file(manifest_path));
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(file + ": " + e.what());
  }
  if (!doc.is_object()) throw FormatError(file + ": manifest must be a JSON object");
  return doc;
}

inline Session parse_header(const nlohmann::json& doc, const std::string& file) {
  Session s;
  s.subject_id = json_field<std::string>(doc, "subject_id", file);
  if (!doc.contains("segments") || !doc["segments"].is_array())
    throw FormatError(file + ": missing 'segments' array");
  if (doc["segments"].empty()) throw FormatError(file + ": empty protocol");

  std::size_t i = 0;
  for (const auto& js : doc["segments"]) {
    const std::string where = file + ": segments[" + std::to_string(i++) + "]";
    Segment seg;
    seg.index = json_field<int>(js, "index", where);
    seg.name = json_field<std::string>(js, "name", where);
    seg.klass = segment_class_from_string(json_field<std::string>(js, "class", where));
    seg.start_s = json_field<double>(js, "start_s", where);
    seg.end_s = json_field<double>(js, "end_s", where);
    if (js.contains("t_perceived_s") && !js["t_perceived_s"].is_null())
      seg.t_perceived = json_field<double>(js, "t_perceived_s", where);
    if (js.contains("vass") && !js["vass"].is_null()) seg.vass = json_field<int>(js, "vass", where);
    s.segments.push_back(std::move(seg));
  }
  return s;
}

}  // namespace detail

/// Subject and segments of a manifest without reading any channel data.
/// Useful when only the questionnaire answers are needed.
inline Session load_session_header(const std::filesystem::path& manifest_path) {
  return detail::parse_header(detail::read_manifest(manifest_path), manifest_path.string());
}

/// Loads and validates a session manifest. Channel paths are relative to the
/// manifest's directory.
inline Session load_session(const std::filesystem::path& manifest_path) {
  const std::string file = manifest_path.string();
  const nlohmann::json doc = detail::read_manifest(manifest_path);
  Session s = detail::parse_header(doc, file);
  if (!doc.contains("channels") || !doc["channels"].is_array())
    throw FormatError(file + ": missing 'channels' array");
  const auto base = manifest_path.parent_path();
  std::size_t i = 0;
  for (const auto& jc : doc["channels"]) {
    const std::string where = file + ": channels[" + std::to_string(i++) + "]";
    SignalChannel ch;
    ch.modality = modality_from_string(detail::json_field<std::string>(jc, "modality", where));
    ch.fs = jc.contains("fs_hz") ? detail::json_field<double>(jc, "fs_hz", where)
                                 : default_sampling_rate(ch.modality);
    ch.t0 = jc.contains("t0_s") ? detail::json_field<double>(jc, "t0_s", where) : 0.0;
    const auto path = base / detail::json_field<std::string>(jc, "file", where);
    if (!std::filesystem::exists(path)) throw FormatError(where + ": missing file " + path.string());
    ch.samples = detail::read_channel_csv(path);
    if (s.channels.contains(ch.modality)) throw FormatError(where + ": duplicate modality");
    s.channels.emplace(ch.modality, std::move(ch));
  }
  try {
    validate(s);
  } catch (const FormatError& e) {
    throw FormatError(file + ": " + e.what());
  }
  return s;
}

inline nlohmann::json session_manifest(const Session& s) {
  nlohmann::json doc;
  doc["subject_id"] = s.subject_id;
  doc["channels"] = nlohmann::json::array();
  for (const auto& [m, ch] : s.channels) {
    doc["channels"].push_back({{"modality", std::string(to_string(m))},
                               {"fs_hz", ch.fs},
                               {"file", detail::channel_file_name(m)},
                               {"t0_s", ch.t0}});
  }
  doc["segments"] = nlohmann::json::array();
  for (const Segment& seg : s.segments) {
    nlohmann::json js = {{"index", seg.index},
                         {"name", seg.name},
                         {"class", std::string(to_string(seg.klass))},
                         {"start_s", seg.start_s},
                         {"end_s", seg.end_s}};
    js["t_perceived_s"] = seg.t_perceived ? nlohmann::json(*seg.t_perceived) : nlohmann::json();
    js["vass"] = seg.vass ? nlohmann::json(*seg.vass) : nlohmann::json();
    doc["segments"].push_back(std::move(js));
  }
  return doc;
}

/// Writes manifest.json plus one CSV per channel into `dir`.
inline std::filesystem::path save_session(const Session& s, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& [m, ch] : s.channels) {
    std::string text = "value\n";
    text.reserve(ch.samples.size() * 12);
    for (double v : ch.samples) {
      text += format_double(v);
      text += '\n';
    }
    detail::write_text_file(dir / detail::channel_file_name(m), text);
  }
  const auto manifest = dir / "manifest.json";
  detail::write_text_file(manifest, session_manifest(s).dump(2) + "\n");
  return manifest;
}

}  // namespace potp

#endif  // POTP_CORE_SESSION_IO_HPP_
