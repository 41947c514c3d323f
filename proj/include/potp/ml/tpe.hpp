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

#ifndef POTP_ML_TPE_HPP_
#define POTP_ML_TPE_HPP_

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

#include "potp/error.hpp"
#include "potp/ml/models/classifier.hpp"
#include "potp/random.hpp"

namespace potp::ml {

struct TpeOptions {
  int budget = 30;
  int n_startup = 10;
  double gamma = 0.25;
  int n_candidates = 24;
  double min_bandwidth_frac = 0.01;
};

struct Trial {
  Hyperparams hp;
  double score = 0.0;
};

struct TpeResult {
  Hyperparams best;
  double best_score = 0.0;
  double startup_mean = 0.0;  // mean score of the random start-up trials
  std::vector<Trial> trials;
};

namespace detail {

inline bool is_numeric(const ParamSpec& p) { return p.kind != ParamKind::Categorical; }

/// Bounds of the parameter in its search coordinate (log for LogFloat).
inline std::pair<double, double> internal_bounds(const ParamSpec& p) {
  if (p.kind == ParamKind::LogFloat) return {std::log(p.lo), std::log(p.hi)};
  if (p.kind == ParamKind::Int || p.kind == ParamKind::OddInt) return {p.lo - 0.5, p.hi + 0.5};
  return {p.lo, p.hi};
}

inline double to_internal(const ParamSpec& p, double v) { return p.kind == ParamKind::LogFloat ? std::log(v) : v; }

/// Maps a search coordinate back to a legal value.
inline double to_value(const ParamSpec& p, double u) {
  switch (p.kind) {
    case ParamKind::LogFloat: return std::clamp(std::exp(u), p.lo, p.hi);
    case ParamKind::Int: return std::clamp(std::round(u), p.lo, p.hi);
    case ParamKind::OddInt: {
      double k = 2.0 * std::floor(u / 2.0) + 1.0;
      while (k < p.lo) k += 2.0;
      while (k > p.hi) k -= 2.0;
      return k;
    }
    case ParamKind::Float: return std::clamp(u, p.lo, p.hi);
    case ParamKind::Categorical: return p.choices.at(static_cast<std::size_t>(u));
  }
  return u;
}

inline double sample_prior(const ParamSpec& p, Rng& rng) {
  if (p.kind == ParamKind::Categorical) return p.choices.at(rng.index(p.choices.size()));
  const auto [lo, hi] = internal_bounds(p);
  return to_value(p, rng.uniform(lo, hi));
}

/// Truncated Gaussian mixture with one component per observation.
struct Parzen {
  std::vector<double> mu, sigma;
  double lo = 0.0, hi = 1.0;

  Parzen(std::vector<double> obs, double lo_, double hi_, double min_frac) : lo(lo_), hi(hi_) {
    const double range = hi - lo;
    std::sort(obs.begin(), obs.end());
    for (std::size_t i = 0; i < obs.size(); ++i) {
      double bw = range;
      if (obs.size() > 1) {
        bw = INFINITY;
        if (i > 0) bw = std::min(bw, obs[i] - obs[i - 1]);
        if (i + 1 < obs.size()) bw = std::min(bw, obs[i + 1] - obs[i]);
      }
      mu.push_back(obs[i]);
      sigma.push_back(std::max(bw, min_frac * range));
    }
  }

  static double phi(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

  double pdf(double x) const {
    double s = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
      const double z = (x - mu[i]) / sigma[i];
      const double mass = phi((hi - mu[i]) / sigma[i]) - phi((lo - mu[i]) / sigma[i]);
      s += std::exp(-0.5 * z * z) / (sigma[i] * std::sqrt(2.0 * std::numbers::pi) * std::max(mass, 1e-300));
    }
    return s / static_cast<double>(mu.size());
  }

  double sample(Rng& rng) const {
    const std::size_t c = rng.index(mu.size());
    for (int attempt = 0; attempt < 100; ++attempt) {
      const double x = rng.normal(mu[c], sigma[c]);
      if (x >= lo && x <= hi) return x;
    }
    return std::clamp(mu[c], lo, hi);
  }
};

/// Smoothed frequencies over the choices.
inline std::vector<double> categorical_weights(const ParamSpec& p, const std::vector<double>& obs) {
  std::vector<double> w(p.choices.size(), 1.0);
  for (double v : obs)
    for (std::size_t k = 0; k < p.choices.size(); ++k)
      if (p.choices[k] == v) w[k] += 1.0;
  const double s = std::accumulate(w.begin(), w.end(), 0.0);
  for (double& x : w) x /= s;
  return w;
}

}  // namespace detail

/// Tree-structured Parzen estimator maximizing `objective`.
inline TpeResult tpe_optimize(const SearchSpace& space, const std::function<double(const Hyperparams&)>& objective,
                              std::uint64_t seed, const TpeOptions& opt = {}) {
  if (space.empty()) throw InvalidArgument("empty search space");
  if (opt.budget < opt.n_startup) throw InvalidArgument("TPE budget must be at least the number of start-up trials");
  TpeResult res;
  for (int t = 0; t < opt.budget; ++t) {
    Hyperparams hp;
    if (t < opt.n_startup) {
      Rng rng(seed, "tpe-startup", static_cast<std::uint64_t>(t));
      for (const auto& p : space) hp[p.name] = detail::sample_prior(p, rng);
    } else {
      Rng rng(seed, "tpe-suggest", static_cast<std::uint64_t>(t));
      // Rank by score (descending), earlier trials first among equals.
      std::vector<std::size_t> order(res.trials.size());
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return res.trials[a].score > res.trials[b].score; });
      const auto n_good = std::max<std::size_t>(
          1, static_cast<std::size_t>(std::ceil(opt.gamma * static_cast<double>(order.size()))));
      std::vector<std::vector<double>> cands(static_cast<std::size_t>(opt.n_candidates));
      std::vector<double> log_ratio(cands.size(), 0.0);
      for (const auto& p : space) {
        std::vector<double> good, bad;
        for (std::size_t r = 0; r < order.size(); ++r) {
          const double v = res.trials[order[r]].hp.at(p.name);
          (r < n_good ? good : bad).push_back(detail::is_numeric(p) ? detail::to_internal(p, v) : v);
        }
        if (detail::is_numeric(p)) {
          const auto [lo, hi] = detail::internal_bounds(p);
          const detail::Parzen l(good, lo, hi, opt.min_bandwidth_frac), g(bad, lo, hi, opt.min_bandwidth_frac);
          for (std::size_t c = 0; c < cands.size(); ++c) {
            const double u = l.sample(rng);
            // Score the value that will actually be evaluated.
            const double v = detail::to_value(p, u);
            const double ui = p.kind == ParamKind::Int || p.kind == ParamKind::OddInt ? v : detail::to_internal(p, v);
            cands[c].push_back(v);
            log_ratio[c] += std::log(std::max(l.pdf(ui), 1e-300)) - std::log(std::max(g.pdf(ui), 1e-300));
          }
        } else {
          const auto wl = detail::categorical_weights(p, good), wg = detail::categorical_weights(p, bad);
          for (std::size_t c = 0; c < cands.size(); ++c) {
            double u = rng.uniform(), acc = 0.0;
            std::size_t k = 0;
            for (; k + 1 < wl.size(); ++k) {
              acc += wl[k];
              if (u < acc) break;
            }
            cands[c].push_back(p.choices[k]);
            log_ratio[c] += std::log(wl[k]) - std::log(wg[k]);
          }
        }
      }
      const auto best = static_cast<std::size_t>(
          std::max_element(log_ratio.begin(), log_ratio.end()) - log_ratio.begin());
      for (std::size_t i = 0; i < space.size(); ++i) hp[space[i].name] = cands[best][i];
    }
    res.trials.push_back({hp, objective(hp)});
  }
  double s = 0.0;
  for (int t = 0; t < opt.n_startup; ++t) s += res.trials[static_cast<std::size_t>(t)].score;
  res.startup_mean = opt.n_startup ? s / opt.n_startup : 0.0;
  std::size_t best = 0;
  for (std::size_t t = 1; t < res.trials.size(); ++t)
    if (res.trials[t].score > res.trials[best].score) best = t;
  res.best = res.trials[best].hp;
  res.best_score = res.trials[best].score;
  return res;
}

}  // namespace potp::ml

#endif  // POTP_ML_TPE_HPP_
