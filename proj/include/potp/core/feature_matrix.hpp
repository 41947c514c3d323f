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

#ifndef POTP_CORE_FEATURE_MATRIX_HPP_
#define POTP_CORE_FEATURE_MATRIX_HPP_

#include <bit>
#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "potp/core/session_io.hpp"
#include "potp/core/text.hpp"

namespace potp {

/// Provenance of one feature row.
struct RowKey {
  std::string subject_id;
  int segment_index = 0;
  int window_index = 0;

  auto operator<=>(const RowKey&) const = default;
};

/// Named biomarker values per window. Row-major, NaN marks missing physiology.
struct FeatureMatrix {
  std::vector<std::string> columns;
  std::vector<RowKey> keys;
  std::vector<std::vector<double>> rows;

  std::size_t n_rows() const { return rows.size(); }
  std::size_t n_cols() const { return columns.size(); }

  std::optional<std::size_t> column_index(std::string_view name) const {
    for (std::size_t j = 0; j < columns.size(); ++j)
      if (columns[j] == name) return j;
    return std::nullopt;
  }

  /// Bitwise equality of values (so NaN == NaN).
  friend bool operator==(const FeatureMatrix& a, const FeatureMatrix& b) {
    if (a.columns != b.columns || a.keys != b.keys || a.rows.size() != b.rows.size())
      return false;
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
      if (a.rows[i].size() != b.rows[i].size()) return false;
      for (std::size_t j = 0; j < a.rows[i].size(); ++j) {
        const double x = a.rows[i][j], y = b.rows[i][j];
        if (std::isnan(x) && std::isnan(y)) continue;
        if (std::bit_cast<std::uint64_t>(x) != std::bit_cast<std::uint64_t>(y)) return false;
      }
    }
    return true;
  }
};

inline void check_unique_columns(const std::vector<std::string>& columns) {
  std::set<std::string> seen{"subject_id", "segment_index", "window_index"};
  for (const auto& c : columns)
    if (!seen.insert(c).second) throw FormatError("duplicate column '" + c + "'");
}

inline std::string feature_matrix_csv(const FeatureMatrix& m) {
  check_unique_columns(m.columns);
  std::string text = "subject_id,segment_index,window_index";
  for (const auto& c : m.columns) text += "," + c;
  text += '\n';
  for (std::size_t i = 0; i < m.rows.size(); ++i) {
    const RowKey& k = m.keys[i];
    text += k.subject_id + "," + std::to_string(k.segment_index) + "," +
            std::to_string(k.window_index);
    for (double v : m.rows[i]) {
      text += ',';
      text += format_double(v);
    }
    text += '\n';
  }
  return text;
}

inline void save_feature_matrix(const FeatureMatrix& m, const std::filesystem::path& path) {
  detail::write_text_file(path, feature_matrix_csv(m));
}

inline FeatureMatrix load_feature_matrix(const std::filesystem::path& path) {
  const std::string file = path.string();
  const std::string text = detail::read_text_file(path);
  FeatureMatrix m;
  std::size_t pos = 0, line_no = 0;
  bool header = true;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    std::string_view line(text.data() + pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    const std::string where = file + ":" + std::to_string(line_no);
    if (header) {
      if (fields.size() < 3 || fields[0] != "subject_id" || fields[1] != "segment_index" ||
          fields[2] != "window_index")
        throw FormatError(where + ": header must start with subject_id,segment_index,window_index");
      for (std::size_t j = 3; j < fields.size(); ++j) m.columns.emplace_back(fields[j]);
      check_unique_columns(m.columns);
      header = false;
      continue;
    }
    if (fields.size() != m.columns.size() + 3)
      throw FormatError(where + ": expected " + std::to_string(m.columns.size() + 3) +
                        " fields, found " + std::to_string(fields.size()));
    RowKey key;
    key.subject_id = std::string(fields[0]);
    auto seg = parse_int(fields[1]);
    auto win = parse_int(fields[2]);
    if (!seg || !win) throw FormatError(where + ": malformed index field");
    key.segment_index = static_cast<int>(*seg);
    key.window_index = static_cast<int>(*win);
    std::vector<double> row(m.columns.size());
    for (std::size_t j = 0; j < row.size(); ++j) {
      auto v = parse_double(fields[j + 3]);
      if (!v)
        throw FormatError(where + ": malformed numeric field '" + std::string(fields[j + 3]) +
                          "' in column " + m.columns[j]);
      row[j] = *v;
    }
    m.keys.push_back(std::move(key));
    m.rows.push_back(std::move(row));
  }
  if (header) throw FormatError(file + ": missing header");
  return m;
}

}  // namespace potp

#endif  // POTP_CORE_FEATURE_MATRIX_HPP_
