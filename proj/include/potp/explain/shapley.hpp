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

#ifndef POTP_EXPLAIN_SHAPLEY_HPP_
#define POTP_EXPLAIN_SHAPLEY_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "potp/core/text.hpp"
#include "potp/error.hpp"
#include "potp/ml/artifact.hpp"
#include "potp/ml/matrix.hpp"
#include "potp/parallel.hpp"
#include "potp/random.hpp"

namespace potp::explain {

inline constexpr std::size_t kDefaultSamples = 2000;
inline constexpr std::size_t kDefaultBackground = 100;

/// Real-valued score per class for one input row.
using ScoreFn = std::function<std::vector<double>(std::span<const double>)>;

struct Attribution {
  std::vector<std::string> feature_names;
  std::vector<std::string> class_names;
  std::vector<std::string> row_ids;
  std::size_t n_features = 0;
  std::size_t n_classes = 0;
  std::vector<double> phi;       // [row][feature][class]
  std::vector<double> se;        // Monte Carlo standard error of phi
  std::vector<double> total_se;  // [row][class], standard error of the sum over features
  std::vector<double> fx;        // [row][class], score of the explained row
  std::vector<double> baseline;  // [class], mean score over the background set
  std::size_t n_samples = 0;
  std::uint64_t seed = 0;

  std::size_t n_rows() const { return row_ids.size(); }
  std::size_t idx(std::size_t r, std::size_t j, std::size_t k) const { return (r * n_features + j) * n_classes + k; }
  double value(std::size_t r, std::size_t j, std::size_t k) const { return phi[idx(r, j, k)]; }
  double error(std::size_t r, std::size_t j, std::size_t k) const { return se[idx(r, j, k)]; }
  double sum(std::size_t r, std::size_t k) const {
    double s = 0.0;
    for (std::size_t j = 0; j < n_features; ++j) s += value(r, j, k);
    return s;
  }
};

/// Seeded subset of at most k row indices, in ascending order.
inline std::vector<std::size_t> sample_background(std::size_t n_rows, std::size_t k, std::uint64_t seed) {
  std::vector<std::size_t> idx(n_rows);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  if (k >= n_rows) return idx;
  Rng rng(seed, "shap-background");
  rng.shuffle(idx);
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

/// Permutation-sampling estimator. Each sample draws a feature order and a
/// background row, then walks from the background row to the explained row
/// one feature at a time; each step is one marginal contribution.
inline Attribution shapley_attributions(const ScoreFn& f, const ml::Matrix& rows, const ml::Matrix& background,
                                        std::size_t n_samples, std::uint64_t seed, int threads = 1,
                                        std::vector<std::string> feature_names = {},
                                        std::vector<std::string> class_names = {}) {
  if (n_samples < 1) throw InvalidArgument("n_samples must be at least 1");
  if (background.rows == 0) throw InvalidArgument("background set is empty");
  if (rows.rows > 0 && rows.cols != background.cols)
    throw InvalidArgument("dimension mismatch between explained rows and background");
  const std::size_t d = background.cols;
  if (feature_names.empty())
    for (std::size_t j = 0; j < d; ++j) feature_names.push_back("x" + std::to_string(j + 1));
  if (feature_names.size() != d) throw InvalidArgument("feature name count does not match the data");

  Attribution a;
  a.n_features = d;
  a.n_samples = n_samples;
  a.seed = seed;
  std::vector<std::vector<double>> bg_scores(background.rows);
  parallel_for(background.rows, threads, [&](std::size_t b) { bg_scores[b] = f(background.row(b)); });
  const std::size_t K = bg_scores.front().size();
  if (K == 0) throw InvalidArgument("model returned no scores");
  for (const auto& s : bg_scores)
    if (s.size() != K) throw InvalidArgument("model returned inconsistent score lengths");
  if (class_names.empty())
    for (std::size_t k = 0; k < K; ++k) class_names.push_back("class" + std::to_string(k));
  if (class_names.size() != K) throw InvalidArgument("class name count does not match the model output");
  a.n_classes = K;
  a.feature_names = std::move(feature_names);
  a.class_names = std::move(class_names);
  a.baseline.assign(K, 0.0);
  for (const auto& s : bg_scores)
    for (std::size_t k = 0; k < K; ++k) a.baseline[k] += s[k] / static_cast<double>(background.rows);

  const std::size_t n = rows.rows;
  for (std::size_t r = 0; r < n; ++r) a.row_ids.push_back(std::to_string(r));
  a.phi.assign(n * d * K, 0.0);
  a.se.assign(n * d * K, 0.0);
  a.total_se.assign(n * K, 0.0);
  a.fx.assign(n * K, 0.0);

  parallel_for(n, threads, [&](std::size_t r) {
    Rng rng(seed, "shapley", r);
    const auto x = rows.row(r);
    const std::vector<double> fx = f(x);
    std::vector<double> sum(d * K, 0.0), sq(d * K, 0.0), tot(K, 0.0), tot_sq(K, 0.0);
    std::vector<std::size_t> order(d);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<double> cur(d);
    for (std::size_t s = 0; s < n_samples; ++s) {
      rng.shuffle(order);
      const std::size_t b = rng.index(background.rows);
      const auto z = background.row(b);
      std::copy(z.begin(), z.end(), cur.begin());
      std::vector<double> prev = bg_scores[b];
      for (std::size_t j : order) {
        if (cur[j] == x[j]) continue;  // contribution is exactly zero
        cur[j] = x[j];
        std::vector<double> next = f(cur);
        for (std::size_t k = 0; k < K; ++k) {
          const double c = next[k] - prev[k];
          sum[j * K + k] += c;
          sq[j * K + k] += c * c;
        }
        prev = std::move(next);
      }
      for (std::size_t k = 0; k < K; ++k) {
        const double t = fx[k] - bg_scores[b][k];
        tot[k] += t;
        tot_sq[k] += t * t;
      }
    }
    const double m = static_cast<double>(n_samples);
    auto stderr_of = [m](double s1, double s2) {
      if (m < 2) return 0.0;
      const double var = std::max(0.0, (s2 - s1 * s1 / m) / (m - 1.0));
      return std::sqrt(var / m);
    };
    for (std::size_t j = 0; j < d; ++j)
      for (std::size_t k = 0; k < K; ++k) {
        a.phi[a.idx(r, j, k)] = sum[j * K + k] / m;
        a.se[a.idx(r, j, k)] = stderr_of(sum[j * K + k], sq[j * K + k]);
      }
    for (std::size_t k = 0; k < K; ++k) {
      a.fx[r * K + k] = fx[k];
      a.total_se[r * K + k] = stderr_of(tot[k], tot_sq[k]);
    }
  });
  return a;
}

/// Attributions for a trained artifact, in the model's own input space
/// (selected features after scaling). The background is a seeded sample of
/// at most kDefaultBackground rows of `reference`.
inline Attribution explain_artifact(const ml::ModelArtifact& art, const ml::Matrix& rows,
                                    const ml::Matrix& reference, const std::vector<std::string>& names,
                                    std::size_t n_samples = kDefaultSamples, std::uint64_t seed = 0,
                                    int threads = 1, std::size_t n_background = kDefaultBackground) {
  const ml::Matrix ref = art.design(reference, names);
  const auto bg_idx = sample_background(ref.rows, n_background, seed);
  const ml::Matrix bg = ref.select_rows(bg_idx);
  const auto model = art.model;
  ScoreFn f = [model](std::span<const double> x) { return model->predict_proba(x); };
  return shapley_attributions(f, art.design(rows, names), bg, n_samples, seed, threads, art.selected_features,
                              art.class_names);
}

struct RankedFeature {
  std::string feature;
  double mean_abs = 0.0;                // over rows and classes
  std::vector<double> per_class;        // mean |phi| over rows, per class
};

/// Descending by mean |phi|; equal values keep input order.
inline std::vector<RankedFeature> rank_features(const Attribution& a) {
  std::vector<RankedFeature> out;
  const double n = static_cast<double>(std::max<std::size_t>(a.n_rows(), 1));
  for (std::size_t j = 0; j < a.n_features; ++j) {
    RankedFeature rf{a.feature_names[j], 0.0, std::vector<double>(a.n_classes, 0.0)};
    for (std::size_t r = 0; r < a.n_rows(); ++r)
      for (std::size_t k = 0; k < a.n_classes; ++k) rf.per_class[k] += std::abs(a.value(r, j, k)) / n;
    for (double v : rf.per_class) rf.mean_abs += v / static_cast<double>(a.n_classes);
    out.push_back(std::move(rf));
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const RankedFeature& x, const RankedFeature& y) { return x.mean_abs > y.mean_abs; });
  return out;
}

inline std::string attribution_csv(const Attribution& a) {
  std::string out = "row_id,feature,class,phi\n";
  for (std::size_t r = 0; r < a.n_rows(); ++r)
    for (std::size_t j = 0; j < a.n_features; ++j)
      for (std::size_t k = 0; k < a.n_classes; ++k)
        out += a.row_ids[r] + "," + a.feature_names[j] + "," + a.class_names[k] + "," +
               format_double(a.value(r, j, k)) + "\n";
  return out;
}

inline std::string ranking_csv(const std::vector<RankedFeature>& ranking, const std::vector<std::string>& classes) {
  std::string out = "rank,feature,mean_abs_phi";
  for (const auto& c : classes) out += ",mean_abs_phi_" + c;
  out += "\n";
  for (std::size_t i = 0; i < ranking.size(); ++i) {
    out += std::to_string(i + 1) + "," + ranking[i].feature + "," + format_double(ranking[i].mean_abs);
    for (double v : ranking[i].per_class) out += "," + format_double(v);
    out += "\n";
  }
  return out;
}

}  // namespace potp::explain

#endif  // POTP_EXPLAIN_SHAPLEY_HPP_
