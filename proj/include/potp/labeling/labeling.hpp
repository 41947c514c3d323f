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

#ifndef POTP_LABELING_LABELING_HPP_
#define POTP_LABELING_LABELING_HPP_

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "potp/core/feature_matrix.hpp"
#include "potp/core/text.hpp"
#include "potp/core/types.hpp"
#include "potp/error.hpp"
#include "potp/labeling/stats.hpp"
#include "potp/numeric.hpp"

namespace potp::labeling {

/// Relative time estimation error in percent; positive means time felt faster.
inline double compute_t_rel(double t_correct_s, double t_perceived_s) {
  if (!(t_correct_s > 0.0)) throw InvalidArgument("t_correct must be positive");
  if (!(t_perceived_s >= 0.0)) throw InvalidArgument("t_perceived must be non-negative");
  return 100.0 * (t_correct_s - t_perceived_s) / t_correct_s;
}

struct TimeError {
  std::string subject_id;
  int segment_index;
  double t_rel;
};

/// t_rel of every segment that carries a perceived duration.
inline std::vector<TimeError> time_errors(const Session& s) {
  std::vector<TimeError> out;
  for (const auto& seg : s.segments)
    if (seg.t_perceived) out.push_back({s.subject_id, seg.index, compute_t_rel(seg.t_correct(), *seg.t_perceived)});
  return out;
}

inline std::vector<TimeError> time_errors(const std::vector<Session>& sessions) {
  std::vector<TimeError> out;
  for (const auto& s : sessions) {
    auto e = time_errors(s);
    out.insert(out.end(), e.begin(), e.end());
  }
  return out;
}

enum class StateLabel { Emotional, Neutral, Cognitive, Excluded };

inline std::string to_string(StateLabel s) {
  switch (s) {
    case StateLabel::Emotional: return "Emotional";
    case StateLabel::Neutral: return "Neutral";
    case StateLabel::Cognitive: return "Cognitive";
    case StateLabel::Excluded: return "Excluded";
  }
  return "?";
}

struct GroupingOptions {
  /// Also count the later rest segments (6 and 9) as Neutral.
  bool rest_as_neutral = false;
};

/// Protocol position to mental-state class: 2-3 Neutral, 4 and 8 Emotional,
/// 5 and 7 Cognitive, 1/6/9 excluded from the three-class task.
inline StateLabel group_state(int segment_index, const GroupingOptions& opt = {}) {
  switch (segment_index) {
    case 2:
    case 3: return StateLabel::Neutral;
    case 4:
    case 8: return StateLabel::Emotional;
    case 5:
    case 7: return StateLabel::Cognitive;
    case 6:
    case 9: return opt.rest_as_neutral ? StateLabel::Neutral : StateLabel::Excluded;
    case 1: return StateLabel::Excluded;
    default: throw InvalidArgument("unknown segment index " + std::to_string(segment_index));
  }
}

inline StateLabel group_state(const Segment& seg, const GroupingOptions& opt = {}) {
  return group_state(seg.index, opt);
}

struct GroupTestRow {
  StateLabel state;
  stats::Tail tail;
  stats::TTestResult test;
  std::string direction;  // Slower, No change, Faster
};

inline constexpr double kAlpha = 0.05;

/// One-sample one-tailed t-tests of t_rel per class: Emotional and Neutral
/// against the left tail, Cognitive against the right tail.
inline std::vector<GroupTestRow> run_group_tests(const std::vector<TimeError>& errors,
                                                 const GroupingOptions& opt = {}, double alpha = kAlpha) {
  std::vector<GroupTestRow> rows;
  for (StateLabel state : {StateLabel::Emotional, StateLabel::Neutral, StateLabel::Cognitive}) {
    std::vector<double> x;
    for (const auto& e : errors)
      if (group_state(e.segment_index, opt) == state) x.push_back(e.t_rel);
    if (x.empty()) throw InvalidArgument("no time errors in class " + to_string(state));
    const auto tail = state == StateLabel::Cognitive ? stats::Tail::Greater : stats::Tail::Less;
    const auto res = stats::one_tailed_t_test(x, tail);
    std::string dir = "No change";
    if (res.p_value < alpha) dir = tail == stats::Tail::Greater ? "Faster" : "Slower";
    rows.push_back({state, tail, res, dir});
  }
  return rows;
}

inline std::string group_tests_csv(const std::vector<GroupTestRow>& rows) {
  std::string out = "class,n,mean_t_rel,sd_t_rel,t_stat,p_value,tail,passage_of_time\n";
  for (const auto& r : rows)
    out += to_string(r.state) + "," + std::to_string(r.test.n) + "," + format_double(r.test.mean) + "," +
           format_double(r.test.sd) + "," + format_double(r.test.t_stat) + "," +
           format_double(r.test.p_value) + "," + stats::to_string(r.tail) + "," + r.direction + "\n";
  return out;
}

struct PotpThresholds {
  double upper;
  double lower;
  double mu_pos, sigma_pos;
  double mu_neg, sigma_neg;
};

inline constexpr std::size_t kMinPerSide = 3;

/// Gaussian moment fit (mean, population standard deviation) to the strictly
/// positive and strictly negative t_rel values. upper = mu_neg + 2 sigma_neg,
/// lower = mu_pos - 2 sigma_pos.
inline PotpThresholds fit_potp_thresholds(std::span<const double> t_rel) {
  std::vector<double> pos, neg;
  for (double v : t_rel) {
    if (!std::isfinite(v)) throw InvalidArgument("non-finite t_rel");
    if (v > 0.0) pos.push_back(v);
    if (v < 0.0) neg.push_back(v);
  }
  if (pos.size() < kMinPerSide || neg.size() < kMinPerSide)
    throw InvalidArgument("insufficient data: need at least 3 positive and 3 negative t_rel values (got " +
                          std::to_string(pos.size()) + " positive, " + std::to_string(neg.size()) +
                          " negative)");
  PotpThresholds th{};
  th.mu_pos = mean(pos);
  th.sigma_pos = stddev(pos);
  th.mu_neg = mean(neg);
  th.sigma_neg = stddev(neg);
  th.upper = th.mu_neg + 2.0 * th.sigma_neg;
  th.lower = th.mu_pos - 2.0 * th.sigma_pos;
  if (!(th.lower < th.upper))
    throw InvalidArgument("crossed thresholds: lower " + format_double(th.lower) + " >= upper " +
                          format_double(th.upper));
  return th;
}

enum class PotpLabel { Slower = -1, Unlabeled = 0, Faster = 1 };

inline std::string to_string(PotpLabel l) {
  switch (l) {
    case PotpLabel::Slower: return "Slower";
    case PotpLabel::Faster: return "Faster";
    case PotpLabel::Unlabeled: return "Unlabeled";
  }
  return "?";
}

/// Strict inequalities: values on a threshold stay Unlabeled.
inline PotpLabel potp_label(double t_rel, const PotpThresholds& th) {
  if (t_rel > th.upper) return PotpLabel::Faster;
  if (t_rel < th.lower) return PotpLabel::Slower;
  return PotpLabel::Unlabeled;
}

/// Feature rows with the per-segment labels propagated to each window.
struct LabeledDataset {
  FeatureMatrix features;
  std::vector<double> t_rel;
  std::vector<StateLabel> state;
  std::vector<PotpLabel> potp;

  std::map<PotpLabel, std::size_t> potp_counts() const {
    std::map<PotpLabel, std::size_t> c{{PotpLabel::Slower, 0}, {PotpLabel::Unlabeled, 0}, {PotpLabel::Faster, 0}};
    for (auto l : potp) ++c[l];
    return c;
  }
  std::map<StateLabel, std::size_t> state_counts() const {
    std::map<StateLabel, std::size_t> c;
    for (auto s : state) ++c[s];
    return c;
  }
};

inline LabeledDataset assign_labels(const FeatureMatrix& m, const std::vector<TimeError>& errors,
                                    const PotpThresholds& th, const GroupingOptions& opt = {}) {
  std::map<std::pair<std::string, int>, double> lookup;
  for (const auto& e : errors) lookup[{e.subject_id, e.segment_index}] = e.t_rel;
  LabeledDataset out;
  out.features = m;
  for (const auto& key : m.keys) {
    const auto it = lookup.find({key.subject_id, key.segment_index});
    if (it == lookup.end())
      throw InvalidArgument("window without matching time error: subject " + key.subject_id + ", segment " +
                            std::to_string(key.segment_index));
    out.t_rel.push_back(it->second);
    out.state.push_back(group_state(key.segment_index, opt));
    out.potp.push_back(potp_label(it->second, th));
  }
  return out;
}

/// Histogram of t_rel with the two fitted normal densities evaluated at each
/// bin centre.
inline std::string threshold_histogram_csv(std::span<const double> t_rel, const PotpThresholds& th,
                                           double bin_width = 10.0) {
  if (!(bin_width > 0.0)) throw InvalidArgument("bin width must be positive");
  std::string out = "bin_center,count,fitted_pos_pdf,fitted_neg_pdf\n";
  if (t_rel.empty()) return out;
  const auto [lo_it, hi_it] = std::minmax_element(t_rel.begin(), t_rel.end());
  const double lo = std::floor(*lo_it / bin_width) * bin_width;
  const auto bins = static_cast<std::size_t>(std::floor((*hi_it - lo) / bin_width)) + 1;
  std::vector<std::size_t> count(bins, 0);
  for (double v : t_rel) ++count[std::min(bins - 1, static_cast<std::size_t>((v - lo) / bin_width))];
  for (std::size_t b = 0; b < bins; ++b) {
    const double c = lo + (static_cast<double>(b) + 0.5) * bin_width;
    out += format_double(c) + "," + std::to_string(count[b]) + "," +
           format_double(stats::normal_pdf(c, th.mu_pos, th.sigma_pos)) + "," +
           format_double(stats::normal_pdf(c, th.mu_neg, th.sigma_neg)) + "\n";
  }
  return out;
}

}  // namespace potp::labeling

#endif  // POTP_LABELING_LABELING_HPP_
