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

#ifndef POTP_DSP_PEAKS_HPP_
#define POTP_DSP_PEAKS_HPP_

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <vector>

namespace potp::dsp {

/// Local maxima of x (plateaus report their first sample), then non-maximum
/// suppression: keeps the highest peaks so that no two are closer than
/// `min_distance` samples. Returned in index order.
inline std::vector<std::size_t> find_peaks(std::span<const double> x, std::size_t min_distance,
                                           double min_height = -HUGE_VAL) {
  std::vector<std::size_t> cand;
  for (std::size_t i = 1; i + 1 < x.size(); ++i) {
    if (x[i] < min_height || !(x[i] > x[i - 1])) continue;
    std::size_t j = i;
    while (j + 1 < x.size() && x[j + 1] == x[i]) ++j;
    if (j + 1 < x.size() && x[j + 1] < x[i]) cand.push_back(i);
    i = j;
  }
  if (min_distance <= 1) return cand;
  std::vector<std::size_t> order(cand.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return x[cand[a]] > x[cand[b]]; });
  std::vector<bool> removed(cand.size(), false);
  std::vector<std::size_t> kept;
  for (std::size_t o : order) {
    if (removed[o]) continue;
    kept.push_back(cand[o]);
    for (std::size_t k = o; k-- > 0 && cand[o] - cand[k] < min_distance;) removed[k] = true;
    for (std::size_t k = o + 1; k < cand.size() && cand[k] - cand[o] < min_distance; ++k)
      removed[k] = true;
  }
  std::sort(kept.begin(), kept.end());
  return kept;
}

inline std::size_t argmax(std::span<const double> x, std::size_t lo, std::size_t hi) {
  std::size_t best = lo;
  for (std::size_t i = lo; i < hi; ++i)
    if (x[i] > x[best]) best = i;
  return best;
}

inline std::size_t argmin(std::span<const double> x, std::size_t lo, std::size_t hi) {
  std::size_t best = lo;
  for (std::size_t i = lo; i < hi; ++i)
    if (x[i] < x[best]) best = i;
  return best;
}

/// True when the filtered signal carries no usable variation relative to the
/// raw amplitude (flatline or constant input).
inline bool is_flat(std::span<const double> filtered, std::span<const double> raw) {
  if (filtered.empty()) return true;
  const auto [lo, hi] = std::minmax_element(filtered.begin(), filtered.end());
  double scale = 0.0;
  for (double v : raw) scale = std::max(scale, std::abs(v));
  const double ptp = *hi - *lo;
  return !(ptp > 1e-9 * scale) || ptp == 0.0;
}

}  // namespace potp::dsp

#endif  // POTP_DSP_PEAKS_HPP_
