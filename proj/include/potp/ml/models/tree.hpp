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

#ifndef POTP_ML_MODELS_TREE_HPP_
#define POTP_ML_MODELS_TREE_HPP_

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "potp/ml/models/classifier.hpp"
#include "potp/random.hpp"

namespace potp::ml {

/// Binary tree node; feature < 0 marks a leaf. Rows with x[feature] <=
/// threshold go left.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  std::vector<double> leaf_value;
};

struct Tree {
  std::vector<TreeNode> nodes;

  const std::vector<double>& leaf(std::span<const double> x) const {
    std::size_t i = 0;
    while (nodes[i].feature >= 0)
      i = static_cast<std::size_t>(x[static_cast<std::size_t>(nodes[i].feature)] <= nodes[i].threshold ? nodes[i].left
                                                                                                      : nodes[i].right);
    return nodes[i].leaf_value;
  }

  int depth() const { return depth_from(0); }

  nlohmann::json to_json() const {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& n : nodes)
      a.push_back({{"feature", n.feature}, {"threshold", n.threshold}, {"left", n.left}, {"right", n.right},
                   {"leaf_value", n.leaf_value}});
    return a;
  }

  static Tree from_json(const nlohmann::json& a) {
    Tree t;
    for (const auto& n : a)
      t.nodes.push_back({n.at("feature").get<int>(), n.at("threshold").get<double>(), n.at("left").get<int>(),
                         n.at("right").get<int>(), n.at("leaf_value").get<std::vector<double>>()});
    const auto size = static_cast<int>(t.nodes.size());
    if (size == 0) throw FormatError("tree without nodes");
    for (const auto& n : t.nodes)
      if (n.feature >= 0 && (n.left <= 0 || n.left >= size || n.right <= 0 || n.right >= size))
        throw FormatError("tree node child index out of range");
    return t;
  }

 private:
  int depth_from(std::size_t i) const {
    if (nodes[i].feature < 0) return 0;
    return 1 + std::max(depth_from(static_cast<std::size_t>(nodes[i].left)),
                        depth_from(static_cast<std::size_t>(nodes[i].right)));
  }
};

/// Midpoint threshold that still separates a < b after rounding.
inline double split_point(double a, double b) {
  const double m = a + 0.5 * (b - a);
  return (m >= b || !std::isfinite(m)) ? a : m;
}

struct CartParams {
  int max_depth = 10;
  int min_leaf = 1;
  std::size_t max_features = 0;  // 0: all features at every split
};

namespace detail {

/// CART with Gini impurity. Candidate splits are scanned in feature order and
/// ascending threshold; only a strictly better split replaces the incumbent.
class CartBuilder {
 public:
  CartBuilder(const Matrix& X, const std::vector<int>& y, int K, const CartParams& p, Rng* rng)
      : X_(X), y_(y), k_(static_cast<std::size_t>(K)), p_(p), rng_(rng), importance_(X.cols, 0.0) {}

  Tree build(std::vector<std::size_t> rows) {
    total_ = static_cast<double>(rows.size());
    tree_.nodes.clear();
    grow(rows, 0);
    return std::move(tree_);
  }

  const std::vector<double>& importance() const { return importance_; }

 private:
  int grow(std::vector<std::size_t>& rows, int depth) {
    const auto id = static_cast<int>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    const std::size_t n = rows.size();
    std::vector<double> counts(k_, 0.0);
    for (auto r : rows) counts[static_cast<std::size_t>(y_[r])] += 1.0;
    double sq = 0.0;
    for (double c : counts) sq += c * c;
    const double nd = static_cast<double>(n);
    const double impurity = nd - sq / nd;  // n * gini
    const auto min_leaf = static_cast<std::size_t>(std::max(1, p_.min_leaf));

    int best_f = -1;
    double best_score = impurity, best_thr = 0.0;
    if (depth < p_.max_depth && impurity > 1e-12 * nd && n >= 2 * min_leaf) {
      std::vector<std::pair<double, int>> col(n);
      for (auto f : candidate_features()) {
        for (std::size_t i = 0; i < n; ++i) col[i] = {X_(rows[i], f), y_[rows[i]]};
        std::sort(col.begin(), col.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        std::vector<double> left(k_, 0.0), right = counts;
        double sq_l = 0.0, sq_r = sq;
        for (std::size_t i = 0; i + 1 < n; ++i) {
          const auto c = static_cast<std::size_t>(col[i].second);
          sq_l += 2.0 * left[c] + 1.0;
          sq_r -= 2.0 * right[c] - 1.0;
          left[c] += 1.0;
          right[c] -= 1.0;
          if (i + 1 < min_leaf || n - i - 1 < min_leaf || !(col[i].first < col[i + 1].first)) continue;
          const double nl = static_cast<double>(i + 1), nr = nd - nl;
          const double score = (nl - sq_l / nl) + (nr - sq_r / nr);
          if (score < best_score - 1e-12 * nd || (best_f < 0 && score <= best_score)) {
            best_score = score;
            best_f = static_cast<int>(f);
            best_thr = split_point(col[i].first, col[i + 1].first);
          }
        }
      }
    }
    if (best_f < 0) {
      for (double& c : counts) c /= nd;
      tree_.nodes[static_cast<std::size_t>(id)].leaf_value = std::move(counts);
      return id;
    }
    importance_[static_cast<std::size_t>(best_f)] += (impurity - best_score) / total_;
    std::vector<std::size_t> lrows, rrows;
    for (auto r : rows) (X_(r, static_cast<std::size_t>(best_f)) <= best_thr ? lrows : rrows).push_back(r);
    rows.clear();
    rows.shrink_to_fit();
    const int l = grow(lrows, depth + 1);
    const int r = grow(rrows, depth + 1);
    auto& node = tree_.nodes[static_cast<std::size_t>(id)];
    node.feature = best_f;
    node.threshold = best_thr;
    node.left = l;
    node.right = r;
    return id;
  }

  std::vector<std::size_t> candidate_features() {
    std::vector<std::size_t> f(X_.cols);
    std::iota(f.begin(), f.end(), 0);
    if (p_.max_features == 0 || p_.max_features >= f.size() || !rng_) return f;
    for (std::size_t i = 0; i < p_.max_features; ++i) std::swap(f[i], f[i + rng_->index(f.size() - i)]);
    f.resize(p_.max_features);
    std::sort(f.begin(), f.end());
    return f;
  }

  const Matrix& X_;
  const std::vector<int>& y_;
  std::size_t k_;
  CartParams p_;
  Rng* rng_;
  std::vector<double> importance_;
  double total_ = 0.0;
  Tree tree_;
};

inline std::vector<double> normalized(std::vector<double> v) {
  const double s = std::accumulate(v.begin(), v.end(), 0.0);
  if (s > 0)
    for (double& x : v) x /= s;
  return v;
}

}  // namespace detail

/// Single CART classification tree.
class Dtc final : public Classifier {
 public:
  explicit Dtc(Hyperparams hp = {}) : Classifier(std::move(hp)) {}
  Algorithm algorithm() const override { return Algorithm::DTC; }

  static SearchSpace search_space() {
    return {{"max_depth", ParamKind::Int, 2, 20, {}}, {"min_leaf", ParamKind::Int, 1, 20, {}}};
  }

  std::optional<std::vector<double>> feature_importance() const override { return importance_; }
  const Tree& tree() const { return tree_; }

 protected:
  void do_fit(const Matrix& X, const std::vector<int>& y, std::uint64_t) override {
    CartParams p;
    p.max_depth = static_cast<int>(std::lround(hp_or(hp_, "max_depth", 10)));
    p.min_leaf = static_cast<int>(std::lround(hp_or(hp_, "min_leaf", 1)));
    detail::CartBuilder b(X, y, n_classes_, p, nullptr);
    std::vector<std::size_t> rows(X.rows);
    std::iota(rows.begin(), rows.end(), 0);
    tree_ = b.build(std::move(rows));
    importance_ = detail::normalized(b.importance());
  }

  std::vector<double> do_proba(std::span<const double> x) const override { return tree_.leaf(x); }

  nlohmann::json params_to_json() const override { return {{"tree", tree_.to_json()}, {"importance", importance_}}; }
  void params_from_json(const nlohmann::json& j) override {
    tree_ = Tree::from_json(j.at("tree"));
    importance_ = j.at("importance").get<std::vector<double>>();
  }

 private:
  Tree tree_;
  std::vector<double> importance_;
};

/// Bagged CART with round(sqrt(d)) candidate features per split. Tree t draws
/// from its own stream derived from the fit seed, so trees are independent
/// of build order.
class Rf final : public Classifier {
 public:
  explicit Rf(Hyperparams hp = {}) : Classifier(std::move(hp)) {}
  Algorithm algorithm() const override { return Algorithm::RF; }

  static SearchSpace search_space() {
    return {{"n_trees", ParamKind::Int, 50, 500, {}}, {"max_depth", ParamKind::Int, 2, 20, {}}};
  }

  std::optional<std::vector<double>> feature_importance() const override { return importance_; }
  const std::vector<Tree>& trees() const { return trees_; }

 protected:
  void do_fit(const Matrix& X, const std::vector<int>& y, std::uint64_t seed) override {
    const auto n_trees = static_cast<std::size_t>(std::max(1L, std::lround(hp_or(hp_, "n_trees", 100))));
    CartParams p;
    p.max_depth = static_cast<int>(std::lround(hp_or(hp_, "max_depth", 10)));
    p.min_leaf = static_cast<int>(std::lround(hp_or(hp_, "min_leaf", 1)));
    p.max_features = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(X.cols)))));
    trees_.clear();
    importance_.assign(X.cols, 0.0);
    for (std::size_t t = 0; t < n_trees; ++t) {
      Rng rng(seed, "rf-tree", t);
      std::vector<std::size_t> rows(X.rows);
      for (auto& r : rows) r = rng.index(X.rows);
      detail::CartBuilder b(X, y, n_classes_, p, &rng);
      trees_.push_back(b.build(std::move(rows)));
      const auto imp = detail::normalized(b.importance());
      for (std::size_t j = 0; j < X.cols; ++j) importance_[j] += imp[j] / static_cast<double>(n_trees);
    }
  }

  std::vector<double> do_proba(std::span<const double> x) const override {
    std::vector<double> p(static_cast<std::size_t>(n_classes_), 0.0);
    for (const auto& t : trees_) {
      const auto& v = t.leaf(x);
      for (std::size_t c = 0; c < p.size(); ++c) p[c] += v[c];
    }
    const double s = std::accumulate(p.begin(), p.end(), 0.0);
    for (double& v : p) v /= s;
    return p;
  }

  nlohmann::json params_to_json() const override {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& t : trees_) a.push_back(t.to_json());
    return {{"trees", a}, {"importance", importance_}};
  }
  void params_from_json(const nlohmann::json& j) override {
    trees_.clear();
    for (const auto& t : j.at("trees")) trees_.push_back(Tree::from_json(t));
    importance_ = j.at("importance").get<std::vector<double>>();
  }

 private:
  std::vector<Tree> trees_;
  std::vector<double> importance_;
};

}  // namespace potp::ml

#endif  // POTP_ML_MODELS_TREE_HPP_
