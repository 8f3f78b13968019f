#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "rbml/tree.hpp"

namespace rbml {

// Bagged trees with sqrt(D) feature subsetting per node. Each tree t draws
// round(max_samples * N) rows with replacement from engine seed + t, so
// fitting order cannot change the result.
class ForestModel final : public Classifier {
 public:
  ForestModel() = default;
  ForestModel(std::size_t n_features, std::size_t n_classes, double max_samples,
              std::uint64_t seed, std::vector<TreeModel> trees,
              std::vector<std::vector<bool>> per_tree_inbag)
      : n_features_(n_features),
        n_classes_(n_classes),
        max_samples_(max_samples),
        seed_(seed),
        trees_(std::move(trees)),
        inbag_(std::move(per_tree_inbag)) {
    if (trees_.empty()) throw data_error("forest has no trees");
    if (inbag_.size() != trees_.size())
      throw data_error("forest in-bag records do not match tree count");
  }

  std::size_t n_features() const override { return n_features_; }
  std::size_t n_classes() const override { return n_classes_; }
  std::size_t n_estimators() const { return trees_.size(); }
  double max_samples() const { return max_samples_; }
  std::uint64_t seed() const { return seed_; }
  const std::vector<TreeModel>& trees() const { return trees_; }
  const std::vector<std::vector<bool>>& inbag() const { return inbag_; }

  void predict_proba_into(std::span<const double> x,
                          std::span<double> out) const override {
    std::fill(out.begin(), out.end(), 0.0);
    for (const auto& tree : trees_) {
      const auto& leaf = tree.leaf_for(x);
      for (std::size_t c = 0; c < out.size(); ++c) out[c] += leaf.probs[c];
    }
    for (auto& v : out) v /= static_cast<double>(trees_.size());
  }

 private:
  std::size_t n_features_ = 0;
  std::size_t n_classes_ = 0;
  double max_samples_ = 1.0;
  std::uint64_t seed_ = 0;
  std::vector<TreeModel> trees_;
  std::vector<std::vector<bool>> inbag_;  // one bitset of length N per tree
};

inline ForestModel fit_forest(const FeatureDataset& ds, std::size_t n_estimators,
                              double max_samples, std::optional<int> max_depth,
                              std::uint64_t seed) {
  if (ds.empty()) throw train_error("fit_forest: empty dataset");
  if (n_estimators < 1) throw train_error("fit_forest: need at least one tree");
  if (!(max_samples > 0.0 && max_samples <= 1.0))
    throw train_error("fit_forest: max_samples must lie in (0,1]");

  const std::size_t n = ds.size();
  const auto draw_count = static_cast<std::size_t>(
      std::llround(max_samples * static_cast<double>(n)));
  const std::size_t draws = std::max<std::size_t>(1, draw_count);
  std::size_t subset = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(ds.dim())))));

  std::vector<TreeModel> trees;
  std::vector<std::vector<bool>> inbag;
  trees.reserve(n_estimators);
  inbag.reserve(n_estimators);

  std::vector<double> multiplicity(n);
  std::vector<std::size_t> rows;
  for (std::size_t t = 0; t < n_estimators; ++t) {
    rng_engine rng(seed + t);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::fill(multiplicity.begin(), multiplicity.end(), 0.0);
    std::vector<bool> bag(n, false);
    for (std::size_t i = 0; i < draws; ++i) {
      std::size_t r = pick(rng);
      multiplicity[r] += 1.0;
      bag[r] = true;
    }
    rows.clear();
    std::vector<double> w;
    for (std::size_t i = 0; i < n; ++i)
      if (bag[i]) {
        rows.push_back(i);
        w.push_back(multiplicity[i]);
      }
    TreeFitOptions opts;
    opts.max_depth = max_depth;
    opts.feature_subset = subset < ds.dim() ? subset : 0;
    opts.seed = rng();
    trees.push_back(fit_tree(ds.subset(rows), w, opts));
    inbag.push_back(std::move(bag));
  }
  return ForestModel(ds.dim(), ds.n_classes(), max_samples, seed,
                     std::move(trees), std::move(inbag));
}

struct OobResult {
  std::optional<double> accuracy;  // empty when no row had an out-of-bag vote
  std::size_t evaluated = 0;
  std::size_t skipped = 0;
};

// Scores each row with the trees whose bootstrap sample excluded it. Rows
// covered by no tree are skipped and counted.
inline OobResult oob_accuracy(const ForestModel& model, const FeatureDataset& ds) {
  if (model.inbag().empty() || model.inbag().front().size() != ds.size())
    throw data_error("oob_accuracy: dataset size does not match training N");

  OobResult res;
  std::size_t hits = 0;
  std::vector<double> acc(model.n_classes());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    std::fill(acc.begin(), acc.end(), 0.0);
    std::size_t votes = 0;
    for (std::size_t t = 0; t < model.trees().size(); ++t) {
      if (model.inbag()[t][i]) continue;
      const auto& leaf = model.trees()[t].leaf_for(ds.row(i));
      for (std::size_t c = 0; c < acc.size(); ++c) acc[c] += leaf.probs[c];
      ++votes;
    }
    if (votes == 0) {
      ++res.skipped;
      continue;
    }
    ++res.evaluated;
    if (argmax(acc) == ds.label(i)) ++hits;
  }
  if (res.evaluated > 0)
    res.accuracy = static_cast<double>(hits) / static_cast<double>(res.evaluated);
  return res;
}

// Mean over trees of the fraction of rows outside the tree's bag; approaches
// e^(-max_samples) for large N.
inline double mean_oob_fraction(const ForestModel& model) {
  double sum = 0.0;
  for (const auto& bag : model.inbag()) {
    std::size_t out = 0;
    for (bool b : bag)
      if (!b) ++out;
    sum += static_cast<double>(out) / static_cast<double>(bag.size());
  }
  return sum / static_cast<double>(model.inbag().size());
}

struct BoostStage {
  TreeModel tree;
  double alpha = 0.0;
};

// Multiclass AdaBoost (SAMME): stage weight gets a + ln(K-1) term so base
// learners only need to beat 1/K accuracy. Probability output is the
// alpha-weighted vote histogram, normalized.
class BoostModel final : public Classifier {
 public:
  BoostModel() = default;
  BoostModel(std::size_t n_features, std::size_t n_classes, double learning_rate,
             std::vector<BoostStage> stages)
      : n_features_(n_features),
        n_classes_(n_classes),
        learning_rate_(learning_rate),
        stages_(std::move(stages)) {
    for (const auto& s : stages_)
      if (!std::isfinite(s.alpha)) throw data_error("boost stage alpha not finite");
  }

  std::size_t n_features() const override { return n_features_; }
  std::size_t n_classes() const override { return n_classes_; }
  double learning_rate() const { return learning_rate_; }
  const std::vector<BoostStage>& stages() const { return stages_; }

  // Model truncated to the first m stages; handy for staged diagnostics.
  BoostModel prefix(std::size_t m) const {
    std::vector<BoostStage> head(stages_.begin(),
                                 stages_.begin() + static_cast<std::ptrdiff_t>(
                                                       std::min(m, stages_.size())));
    return BoostModel(n_features_, n_classes_, learning_rate_, std::move(head));
  }

  void predict_proba_into(std::span<const double> x,
                          std::span<double> out) const override {
    if (stages_.empty()) throw data_error("boost model has no stages");
    std::fill(out.begin(), out.end(), 0.0);
    double total = 0.0;
    for (const auto& s : stages_) {
      out[argmax(s.tree.leaf_for(x).probs)] += s.alpha;
      total += s.alpha;
    }
    for (auto& v : out) v /= total;
  }

 private:
  std::size_t n_features_ = 0;
  std::size_t n_classes_ = 0;
  double learning_rate_ = 1.0;
  std::vector<BoostStage> stages_;
};

inline constexpr double kBoostAlphaCap = 23.025850929940457;  // ln(1e10)

inline BoostModel fit_adaboost(const FeatureDataset& ds, std::size_t n_estimators,
                               double learning_rate, std::optional<int> max_depth,
                               std::uint64_t seed) {
  if (ds.empty()) throw train_error("fit_adaboost: empty dataset");
  if (n_estimators < 1) throw train_error("fit_adaboost: need at least one stage");
  if (!(learning_rate > 0.0)) throw train_error("fit_adaboost: learning rate must be > 0");
  const std::size_t n = ds.size();
  const auto k = static_cast<double>(ds.n_classes());
  if (ds.n_classes() < 2) throw train_error("fit_adaboost: need at least two classes");

  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  std::vector<BoostStage> stages;
  std::vector<bool> miss(n);

  for (std::size_t m = 0; m < n_estimators; ++m) {
    TreeFitOptions opts;
    opts.max_depth = max_depth;
    opts.seed = seed + m;
    TreeModel tree = fit_tree(ds, w, opts);

    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      miss[i] = argmax(tree.leaf_for(ds.row(i)).probs) != ds.label(i);
      if (miss[i]) err += w[i];
    }

    if (err <= 0.0) {
      stages.push_back({std::move(tree), kBoostAlphaCap});
      break;  // perfect stage dominates; nothing left to reweight
    }
    if (err >= 1.0 - 1.0 / k) break;  // weaker than chance; discard and stop

    double alpha = learning_rate * (std::log((1.0 - err) / err) + std::log(k - 1.0));
    alpha = std::min(alpha, kBoostAlphaCap);
    stages.push_back({std::move(tree), alpha});

    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (miss[i]) w[i] *= std::exp(alpha);
      sum += w[i];
    }
    for (auto& wi : w) wi /= sum;
  }
  return BoostModel(ds.dim(), ds.n_classes(), learning_rate, std::move(stages));
}

// Soft-voting combiner: weighted mean of member probability vectors.
class VotingModel final : public Classifier {
 public:
  VotingModel() = default;
  VotingModel(std::vector<std::shared_ptr<const Classifier>> members,
              std::vector<double> weights)
      : members_(std::move(members)), weights_(std::move(weights)) {
    if (members_.size() < 2)
      throw data_error("voting model needs at least two members");
    if (weights_.empty()) weights_.assign(members_.size(), 1.0);
    if (weights_.size() != members_.size())
      throw data_error("voting weights length does not match member count");
    for (double wv : weights_)
      if (!(wv >= 0.0) || !std::isfinite(wv))
        throw data_error("voting weights must be finite and >= 0");
    double sum = 0.0;
    for (double wv : weights_) sum += wv;
    if (sum <= 0.0) throw data_error("voting weights sum to zero");
    for (const auto& m : members_) {
      if (!m) throw data_error("voting member is null");
      if (m->n_features() != members_.front()->n_features() ||
          m->n_classes() != members_.front()->n_classes())
        throw data_error("voting members disagree on feature or class count");
    }
  }

  std::size_t n_features() const override { return members_.front()->n_features(); }
  std::size_t n_classes() const override { return members_.front()->n_classes(); }
  const std::vector<std::shared_ptr<const Classifier>>& members() const {
    return members_;
  }
  const std::vector<double>& weights() const { return weights_; }

  void predict_proba_into(std::span<const double> x,
                          std::span<double> out) const override {
    std::fill(out.begin(), out.end(), 0.0);
    std::vector<double> p(n_classes());
    double total = 0.0;
    for (std::size_t m = 0; m < members_.size(); ++m) {
      members_[m]->predict_proba_into(x, p);
      for (std::size_t c = 0; c < p.size(); ++c) out[c] += weights_[m] * p[c];
      total += weights_[m];
    }
    for (auto& v : out) v /= total;
  }

 private:
  std::vector<std::shared_ptr<const Classifier>> members_;
  std::vector<double> weights_;
};

inline VotingModel fit_voting(std::vector<std::shared_ptr<const Classifier>> members,
                              std::vector<double> weights = {}) {
  return VotingModel(std::move(members), std::move(weights));
}

}  // namespace rbml
