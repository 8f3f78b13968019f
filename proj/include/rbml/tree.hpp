#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "rbml/classifier.hpp"
#include "rbml/dataset.hpp"

namespace rbml {

// 1 - sum((count_c / total)^2). Counts may be fractional (sample weights).
inline double gini_impurity(std::span<const double> counts) {
  double total = 0.0;
  for (double c : counts) {
    if (c < 0.0 || !std::isfinite(c)) throw data_error("gini: counts must be finite and >= 0");
    total += c;
  }
  if (total <= 0.0) throw data_error("gini: counts sum to zero");
  double s = 0.0;
  for (double c : counts) {
    double p = c / total;
    s += p * p;
  }
  return 1.0 - s;
}

struct TreeNode {
  std::int32_t feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  std::uint32_t left = 0;
  std::uint32_t right = 0;
  std::vector<double> probs;  // leaves only; sums to 1
};

struct TreeFitOptions {
  std::optional<int> max_depth;   // nullopt = unlimited
  std::size_t feature_subset = 0; // candidate features per node; 0 = all
  std::uint64_t seed = 0;
};

// CART-style classifier: axis-aligned splits chosen by weighted Gini
// impurity, thresholds at midpoints between consecutive distinct values,
// ties broken toward the lowest feature index then lowest threshold.
class TreeModel final : public Classifier {
 public:
  TreeModel() = default;
  TreeModel(std::size_t n_features, std::size_t n_classes,
            std::optional<int> max_depth, std::vector<TreeNode> nodes)
      : n_features_(n_features),
        n_classes_(n_classes),
        max_depth_(max_depth),
        nodes_(std::move(nodes)) {
    validate();
  }

  std::size_t n_features() const override { return n_features_; }
  std::size_t n_classes() const override { return n_classes_; }
  std::optional<int> max_depth() const { return max_depth_; }
  const std::vector<TreeNode>& nodes() const { return nodes_; }

  const TreeNode& leaf_for(std::span<const double> x) const {
    std::size_t i = 0;
    while (nodes_[i].feature >= 0) {
      const auto& n = nodes_[i];
      i = x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
    }
    return nodes_[i];
  }

  void predict_proba_into(std::span<const double> x,
                          std::span<double> out) const override {
    const auto& leaf = leaf_for(x);
    std::copy(leaf.probs.begin(), leaf.probs.end(), out.begin());
  }

  std::size_t depth() const {
    std::function<std::size_t(std::size_t)> walk = [&](std::size_t i) -> std::size_t {
      if (nodes_[i].feature < 0) return 0;
      return 1 + std::max(walk(nodes_[i].left), walk(nodes_[i].right));
    };
    return nodes_.empty() ? 0 : walk(0);
  }

 private:
  void validate() const {
    if (nodes_.empty()) throw data_error("tree has no nodes");
    for (const auto& n : nodes_) {
      if (n.feature < 0) {
        if (n.probs.size() != n_classes_)
          throw data_error("leaf probability vector has wrong length");
        double s = std::accumulate(n.probs.begin(), n.probs.end(), 0.0);
        if (std::abs(s - 1.0) > 1e-9)
          throw data_error("leaf probabilities do not sum to 1");
      } else {
        if (static_cast<std::size_t>(n.feature) >= n_features_ ||
            n.left >= nodes_.size() || n.right >= nodes_.size())
          throw data_error("malformed tree node");
      }
    }
  }

  std::size_t n_features_ = 0;
  std::size_t n_classes_ = 0;
  std::optional<int> max_depth_;
  std::vector<TreeNode> nodes_;
};

namespace detail {

struct SplitCandidate {
  bool found = false;
  std::size_t feature = 0;
  double threshold = 0.0;
  double score = -std::numeric_limits<double>::infinity();
};

// Best split on one feature by maximizing sum_child(sum_c w_c^2 / W_child),
// which orders identically to minimizing weighted child Gini.
inline void scan_feature(const FeatureDataset& ds, std::span<const double> w,
                         std::span<const std::size_t> idx, std::size_t feature,
                         std::vector<std::pair<double, std::size_t>>& order,
                         std::vector<double>& left_w, std::span<const double> total_w,
                         double total, SplitCandidate& best) {
  order.clear();
  for (std::size_t i : idx) order.emplace_back(ds.row(i)[feature], i);
  std::sort(order.begin(), order.end());
  if (order.front().first == order.back().first) return;  // constant feature

  std::fill(left_w.begin(), left_w.end(), 0.0);
  double left_total = 0.0;
  const std::size_t k = left_w.size();
  for (std::size_t pos = 0; pos + 1 < order.size(); ++pos) {
    auto [value, row] = order[pos];
    left_w[ds.label(row)] += w[row];
    left_total += w[row];
    if (order[pos + 1].first == value) continue;  // not a distinct-value boundary
    double right_total = total - left_total;
    if (left_total <= 0.0 || right_total <= 0.0) continue;
    double s = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      double lc = left_w[c];
      double rc = total_w[c] - lc;
      s += lc * lc / left_total + rc * rc / right_total;
    }
    if (!best.found || s > best.score) {
      best.found = true;
      best.feature = feature;
      best.threshold = std::midpoint(value, order[pos + 1].first);
      best.score = s;
    }
  }
}

}  // namespace detail

// Greedy weighted-Gini tree induction. Splitting continues while a valid
// candidate exists (distinct values on some candidate feature), the node is
// impure and depth remains; zero-gain splits are taken so depth-limited trees
// can still separate XOR-like layouts. feature_subset picks that many
// candidate features per node from a node-local seed.
inline TreeModel fit_tree(const FeatureDataset& ds, std::span<const double> weights,
                          const TreeFitOptions& opts = {}) {
  if (ds.empty()) throw data_error("fit_tree: empty dataset");
  const std::size_t n = ds.size();
  const std::size_t k = ds.n_classes();

  std::vector<double> w;
  if (weights.empty()) {
    w.assign(n, 1.0);
  } else {
    if (weights.size() != n) throw data_error("fit_tree: weight length mismatch");
    w.assign(weights.begin(), weights.end());
    double sum = 0.0;
    for (double x : w) {
      if (!std::isfinite(x) || x < 0.0)
        throw data_error("fit_tree: weights must be finite and >= 0");
      sum += x;
    }
    if (sum <= 0.0) throw data_error("fit_tree: weights sum to zero");
  }

  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);

  std::vector<TreeNode> nodes;
  std::vector<std::pair<double, std::size_t>> order;
  std::vector<double> left_w(k);
  std::vector<std::size_t> all_features(ds.dim());
  std::iota(all_features.begin(), all_features.end(), 0);

  std::function<std::uint32_t(std::span<std::size_t>, int)> build =
      [&](std::span<std::size_t> node_idx, int depth) -> std::uint32_t {
    auto id = static_cast<std::uint32_t>(nodes.size());
    nodes.emplace_back();

    std::vector<double> class_w(k, 0.0);
    double total = 0.0;
    for (std::size_t i : node_idx) {
      class_w[ds.label(i)] += w[i];
      total += w[i];
    }

    auto make_leaf = [&] {
      auto& leaf = nodes[id];
      leaf.probs.resize(k);
      for (std::size_t c = 0; c < k; ++c) leaf.probs[c] = class_w[c] / total;
    };

    std::size_t live_classes = 0;
    for (double cw : class_w)
      if (cw > 0.0) ++live_classes;
    bool depth_ok = !opts.max_depth || depth < *opts.max_depth;
    if (live_classes <= 1 || !depth_ok) {
      make_leaf();
      return id;
    }

    detail::SplitCandidate best;
    if (opts.feature_subset == 0 || opts.feature_subset >= ds.dim()) {
      for (std::size_t f = 0; f < ds.dim(); ++f)
        detail::scan_feature(ds, w, node_idx, f, order, left_w, class_w, total, best);
    } else {
      rng_engine rng(mix_seed(opts.seed, id));
      std::vector<std::size_t> pool = all_features;
      for (std::size_t i = 0; i < opts.feature_subset; ++i) {
        std::uniform_int_distribution<std::size_t> d(i, pool.size() - 1);
        std::swap(pool[i], pool[d(rng)]);
      }
      pool.resize(opts.feature_subset);
      std::sort(pool.begin(), pool.end());
      for (std::size_t f : pool)
        detail::scan_feature(ds, w, node_idx, f, order, left_w, class_w, total, best);
    }

    if (!best.found) {
      make_leaf();
      return id;
    }

    auto mid = std::stable_partition(node_idx.begin(), node_idx.end(), [&](std::size_t i) {
      return ds.row(i)[best.feature] <= best.threshold;
    });
    auto n_left = static_cast<std::size_t>(mid - node_idx.begin());

    nodes[id].feature = static_cast<std::int32_t>(best.feature);
    nodes[id].threshold = best.threshold;
    std::uint32_t left = build(node_idx.first(n_left), depth + 1);
    std::uint32_t right = build(node_idx.subspan(n_left), depth + 1);
    nodes[id].left = left;
    nodes[id].right = right;
    return id;
  };

  build(std::span<std::size_t>(idx), 0);
  return TreeModel(ds.dim(), k, opts.max_depth, std::move(nodes));
}

inline TreeModel fit_tree(const FeatureDataset& ds, const TreeFitOptions& opts = {}) {
  return fit_tree(ds, std::span<const double>{}, opts);
}

// Fraction of total weight the model classifies correctly.
inline double weighted_accuracy(const Classifier& model, const FeatureDataset& ds,
                                std::span<const double> weights = {}) {
  if (ds.empty()) throw data_error("weighted_accuracy: empty dataset");
  double hit = 0.0, total = 0.0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    double wi = weights.empty() ? 1.0 : weights[i];
    total += wi;
    if (model.predict(ds.row(i)) == ds.label(i)) hit += wi;
  }
  return hit / total;
}

}  // namespace rbml
