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

#ifndef POTP_ML_MODELS_XGB_HPP_
#define POTP_ML_MODELS_XGB_HPP_

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "potp/ml/models/tree.hpp"

namespace potp::ml {

/// Second-order gradient boosted trees on the logistic (binary) or softmax
/// loss with L2-regularized leaf weights. Exact greedy splits, grown level by
/// level over presorted feature columns.
class Xgb final : public Classifier {
 public:
  static constexpr double kMinChildWeight = 1.0;

  explicit Xgb(Hyperparams hp = {}) : Classifier(std::move(hp)) {}
  Algorithm algorithm() const override { return Algorithm::XGB; }

  static SearchSpace search_space() {
    return {{"eta", ParamKind::LogFloat, 0.01, 0.3, {}},
            {"n_rounds", ParamKind::Int, 50, 500, {}},
            {"max_depth", ParamKind::Int, 2, 8, {}},
            {"lambda", ParamKind::LogFloat, 0.1, 10.0, {}}};
  }

  std::optional<std::vector<double>> feature_importance() const override { return importance_; }
  const std::vector<std::vector<Tree>>& trees() const { return trees_; }

 protected:
  void do_fit(const Matrix& X, const std::vector<int>& y, std::uint64_t) override {
    eta_ = hp_or(hp_, "eta", 0.1);
    lambda_ = hp_or(hp_, "lambda", 1.0);
    const auto rounds = static_cast<std::size_t>(std::max(1L, std::lround(hp_or(hp_, "n_rounds", 100))));
    max_depth_ = static_cast<int>(std::lround(hp_or(hp_, "max_depth", 3)));
    const std::size_t n = X.rows, d = X.cols;
    const std::size_t k = n_classes_ == 2 ? 1 : static_cast<std::size_t>(n_classes_);

    order_.assign(d, std::vector<std::size_t>(n));
    for (std::size_t f = 0; f < d; ++f) {
      auto& o = order_[f];
      std::iota(o.begin(), o.end(), 0);
      std::stable_sort(o.begin(), o.end(), [&](std::size_t a, std::size_t b) { return X(a, f) < X(b, f); });
    }
    trees_.clear();
    importance_.assign(d, 0.0);
    std::vector<double> F(n * k, 0.0), g(n), h(n), p(k);
    for (std::size_t r = 0; r < rounds; ++r) {
      std::vector<Tree> round_trees;
      // All class trees of a round see the same margins.
      const std::vector<double> F0 = F;
      for (std::size_t c = 0; c < k; ++c) {
        for (std::size_t i = 0; i < n; ++i) {
          double pc;
          if (k == 1) {
            pc = 1.0 / (1.0 + std::exp(-F0[i]));
          } else {
            for (std::size_t q = 0; q < k; ++q) p[q] = F0[i * k + q];
            softmax(p);
            pc = p[c];
          }
          const double target = (k == 1 ? y[i] == 1 : y[i] == static_cast<int>(c)) ? 1.0 : 0.0;
          g[i] = pc - target;
          h[i] = std::max(pc * (1.0 - pc), 1e-16);
        }
        Tree t = grow(X, g, h);
        for (std::size_t i = 0; i < n; ++i) F[i * k + c] += t.leaf(X.row(i))[0];
        round_trees.push_back(std::move(t));
      }
      trees_.push_back(std::move(round_trees));
    }
    order_.clear();
    importance_ = detail::normalized(importance_);
  }

  std::vector<double> do_proba(std::span<const double> x) const override {
    const std::size_t k = n_classes_ == 2 ? 1 : static_cast<std::size_t>(n_classes_);
    std::vector<double> m(k, 0.0);
    for (const auto& rt : trees_)
      for (std::size_t c = 0; c < k; ++c) m[c] += rt[c].leaf(x)[0];
    if (k == 1) {
      const double p1 = 1.0 / (1.0 + std::exp(-m[0]));
      return {1.0 - p1, p1};
    }
    softmax(m);
    return m;
  }

  nlohmann::json params_to_json() const override {
    nlohmann::json rounds = nlohmann::json::array();
    for (const auto& rt : trees_) {
      nlohmann::json a = nlohmann::json::array();
      for (const auto& t : rt) a.push_back(t.to_json());
      rounds.push_back(a);
    }
    return {{"rounds", rounds}, {"importance", importance_}};
  }
  void params_from_json(const nlohmann::json& j) override {
    trees_.clear();
    for (const auto& a : j.at("rounds")) {
      std::vector<Tree> rt;
      for (const auto& t : a) rt.push_back(Tree::from_json(t));
      trees_.push_back(std::move(rt));
    }
    importance_ = j.at("importance").get<std::vector<double>>();
  }

 private:
  Tree grow(const Matrix& X, const std::vector<double>& g, const std::vector<double>& h) {
    const std::size_t n = X.rows;
    Tree tree;
    tree.nodes.emplace_back();
    std::vector<double> G(1, std::accumulate(g.begin(), g.end(), 0.0)), H(1, std::accumulate(h.begin(), h.end(), 0.0));
    std::vector<int> node_of(n, 0);
    std::vector<int> frontier = {0};
    for (int depth = 0; depth < max_depth_ && !frontier.empty(); ++depth) {
      const std::size_t m = tree.nodes.size();
      std::vector<char> active(m, 0);
      for (int id : frontier) active[static_cast<std::size_t>(id)] = 1;
      std::vector<double> best_gain(m, 0.0), best_thr(m, 0.0);
      std::vector<int> best_f(m, -1);
      std::vector<double> gl(m), hl(m), last(m);
      std::vector<char> seen(m);
      for (std::size_t f = 0; f < X.cols; ++f) {
        std::fill(gl.begin(), gl.end(), 0.0);
        std::fill(hl.begin(), hl.end(), 0.0);
        std::fill(seen.begin(), seen.end(), 0);
        for (std::size_t r : order_[f]) {
          const auto id = static_cast<std::size_t>(node_of[r]);
          if (!active[id]) continue;
          const double v = X(r, f);
          if (seen[id] && v > last[id]) {
            const double gr = G[id] - gl[id], hr = H[id] - hl[id];
            if (hl[id] >= kMinChildWeight && hr >= kMinChildWeight) {
              const double gain = 0.5 * (gl[id] * gl[id] / (hl[id] + lambda_) + gr * gr / (hr + lambda_) -
                                         G[id] * G[id] / (H[id] + lambda_));
              if (gain > best_gain[id] + 1e-12) {
                best_gain[id] = gain;
                best_f[id] = static_cast<int>(f);
                best_thr[id] = split_point(last[id], v);
              }
            }
          }
          gl[id] += g[r];
          hl[id] += h[r];
          last[id] = v;
          seen[id] = 1;
        }
      }
      std::vector<int> next;
      for (int id : frontier) {
        const auto u = static_cast<std::size_t>(id);
        if (best_f[u] < 0) continue;
        const auto l = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();
        tree.nodes.emplace_back();
        tree.nodes[u].feature = best_f[u];
        tree.nodes[u].threshold = best_thr[u];
        tree.nodes[u].left = l;
        tree.nodes[u].right = l + 1;
        importance_[static_cast<std::size_t>(best_f[u])] += best_gain[u];
        G.resize(tree.nodes.size(), 0.0);
        H.resize(tree.nodes.size(), 0.0);
        next.push_back(l);
        next.push_back(l + 1);
      }
      for (std::size_t r = 0; r < n; ++r) {
        const auto& node = tree.nodes[static_cast<std::size_t>(node_of[r])];
        if (node.feature < 0 || !active[static_cast<std::size_t>(node_of[r])]) continue;
        node_of[r] = X(r, static_cast<std::size_t>(node.feature)) <= node.threshold ? node.left : node.right;
        G[static_cast<std::size_t>(node_of[r])] += g[r];
        H[static_cast<std::size_t>(node_of[r])] += h[r];
      }
      frontier = std::move(next);
    }
    for (std::size_t u = 0; u < tree.nodes.size(); ++u)
      if (tree.nodes[u].feature < 0) tree.nodes[u].leaf_value = {-eta_ * G[u] / (H[u] + lambda_)};
    return tree;
  }

  double eta_ = 0.1;
  double lambda_ = 1.0;
  int max_depth_ = 3;
  std::vector<std::vector<std::size_t>> order_;
  std::vector<std::vector<Tree>> trees_;
  std::vector<double> importance_;
};

}  // namespace potp::ml

#endif  // POTP_ML_MODELS_XGB_HPP_
