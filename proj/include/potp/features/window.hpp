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

#ifndef POTP_FEATURES_WINDOW_HPP_
#define POTP_FEATURES_WINDOW_HPP_

#include <cmath>
#include <string>
#include <vector>

#include "potp/core/types.hpp"

namespace potp::features {

inline constexpr double kDefaultWindowS = 45.0;

struct Window {
  std::string subject_id;
  int segment_index = 0;
  int window_index = 0;
  double start_s = 0.0;
  double len_s = kDefaultWindowS;

  double end_s() const { return start_s + len_s; }
};

/// Contiguous non-overlapping windows aligned to each segment start; the
/// trailing remainder shorter than one window is discarded.
inline std::vector<Window> segment_windows(const Session& session, double len_s = kDefaultWindowS) {
  if (!(len_s > 0.0)) throw InvalidArgument("window length must be positive");
  std::vector<Window> out;
  for (const Segment& seg : session.segments) {
    const auto count = static_cast<int>(std::floor(seg.t_correct() / len_s + 1e-9));
    for (int w = 0; w < count; ++w)
      out.push_back({session.subject_id, seg.index, w, seg.start_s + w * len_s, len_s});
  }
  return out;
}

}  // namespace potp::features

#endif  // POTP_FEATURES_WINDOW_HPP_
