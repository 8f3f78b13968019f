#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rbml/common.hpp"

namespace rbml {

// Provenance tag given to rows synthesized by SMOTE; loaders and generators
// use small values starting at 0 for real sources.
inline constexpr std::uint8_t kSyntheticTag = 255;

// N labeled D-dimensional feature vectors, immutable once built.
// Labels are dense indices into a class-name table.
class FeatureDataset {
 public:
  FeatureDataset() = default;

  FeatureDataset(std::size_t dim, std::vector<std::string> class_names)
      : dim_(dim), class_names_(std::move(class_names)) {
    check_names();
  }

  FeatureDataset(std::size_t dim, std::vector<std::string> class_names,
                 std::vector<double> features, std::vector<std::uint32_t> labels,
                 std::vector<std::uint8_t> source_tags = {})
      : dim_(dim),
        features_(std::move(features)),
        labels_(std::move(labels)),
        tags_(std::move(source_tags)),
        class_names_(std::move(class_names)) {
    check_names();
    if (dim_ == 0) throw data_error("feature dimension must be positive");
    if (features_.size() != labels_.size() * dim_)
      throw data_error("feature buffer size does not match N*D");
    if (tags_.empty()) tags_.assign(labels_.size(), 0);
    if (tags_.size() != labels_.size())
      throw data_error("source_tags length does not match row count");
    for (std::uint32_t l : labels_)
      if (l >= class_names_.size()) throw data_error("label index out of range");
    for (double v : features_)
      if (!std::isfinite(v)) throw data_error("non-finite feature value");
  }

  std::size_t size() const { return labels_.size(); }
  std::size_t dim() const { return dim_; }
  std::size_t n_classes() const { return class_names_.size(); }
  bool empty() const { return labels_.empty(); }

  std::span<const double> row(std::size_t i) const {
    return {features_.data() + i * dim_, dim_};
  }
  std::uint32_t label(std::size_t i) const { return labels_[i]; }
  std::uint8_t tag(std::size_t i) const { return tags_[i]; }

  const std::vector<double>& features() const { return features_; }
  const std::vector<std::uint32_t>& labels() const { return labels_; }
  const std::vector<std::uint8_t>& tags() const { return tags_; }
  const std::vector<std::string>& class_names() const { return class_names_; }

  // Construction-phase append; rows are immutable once the dataset is shared.
  void push_row(std::span<const double> x, std::uint32_t label,
                std::uint8_t tag = 0) {
    if (x.size() != dim_) throw data_error("row dimension mismatch");
    if (label >= class_names_.size()) throw data_error("label index out of range");
    for (double v : x)
      if (!std::isfinite(v)) throw data_error("non-finite feature value");
    features_.insert(features_.end(), x.begin(), x.end());
    labels_.push_back(label);
    tags_.push_back(tag);
  }

  std::vector<std::size_t> class_counts() const {
    std::vector<std::size_t> counts(n_classes(), 0);
    for (std::uint32_t l : labels_) ++counts[l];
    return counts;
  }

  // Rows selected by index, in the given order.
  FeatureDataset subset(std::span<const std::size_t> idx) const {
    FeatureDataset out(dim_, class_names_);
    out.features_.reserve(idx.size() * dim_);
    for (std::size_t i : idx) out.push_row(row(i), labels_[i], tags_[i]);
    return out;
  }

  // FNV over shape, labels and raw feature bytes; identifies the exact data a
  // model was trained on.
  std::string fingerprint() const {
    std::uint64_t h = fnv1a64(&dim_, sizeof(dim_));
    std::size_t n = size();
    h = fnv1a64(&n, sizeof(n), h);
    h = fnv1a64(labels_.data(), labels_.size() * sizeof(std::uint32_t), h);
    h = fnv1a64(features_.data(), features_.size() * sizeof(double), h);
    for (const auto& name : class_names_)
      h = fnv1a64(name.data(), name.size(), h);
    return to_hex(h);
  }

 private:
  void check_names() const {
    if (class_names_.empty()) throw data_error("class name table is empty");
    for (std::size_t i = 0; i < class_names_.size(); ++i)
      for (std::size_t j = i + 1; j < class_names_.size(); ++j)
        if (class_names_[i] == class_names_[j])
          throw data_error("duplicate class name: " + class_names_[i]);
  }

  std::size_t dim_ = 0;
  std::vector<double> features_;  // row-major N x D
  std::vector<std::uint32_t> labels_;
  std::vector<std::uint8_t> tags_;
  std::vector<std::string> class_names_;
};

struct ClassDistribution {
  std::vector<std::size_t> counts;

  std::size_t total() const {
    return std::accumulate(counts.begin(), counts.end(), std::size_t{0});
  }
  bool operator==(const ClassDistribution&) const = default;
};

inline ClassDistribution class_distribution(const FeatureDataset& ds) {
  return {ds.class_counts()};
}

struct SplitPair {
  FeatureDataset train;
  FeatureDataset val;
  std::vector<std::string> warnings;
};

namespace detail {

// Round-half-up per class, then walk drift back onto the classes whose
// rounding error pushed the total off, largest error first. Keeps every class
// within one row of the exact fraction.
inline std::vector<std::size_t> stratified_train_counts(
    const std::vector<std::size_t>& counts, double fraction) {
  const std::size_t k = counts.size();
  std::vector<std::size_t> train(k, 0);
  std::vector<double> err(k, 0.0);  // assigned - exact
  long long total = 0;
  for (std::size_t c = 0; c < k; ++c) {
    if (counts[c] == 0) continue;
    double exact = fraction * static_cast<double>(counts[c]);
    auto t = static_cast<long long>(std::floor(exact + 0.5));
    t = std::max<long long>(1, t);
    if (counts[c] >= 2)
      t = std::min<long long>(t, static_cast<long long>(counts[c]) - 1);
    else
      t = std::min<long long>(t, static_cast<long long>(counts[c]));
    train[c] = static_cast<std::size_t>(t);
    err[c] = static_cast<double>(t) - exact;
    total += t;
  }
  std::size_t n = std::accumulate(counts.begin(), counts.end(), std::size_t{0});
  auto target = static_cast<long long>(std::floor(fraction * static_cast<double>(n) + 0.5));

  auto adjustable = [&](std::size_t c, int dir) {
    if (counts[c] == 0) return false;
    long long t = static_cast<long long>(train[c]) + dir;
    long long hi = counts[c] >= 2 ? static_cast<long long>(counts[c]) - 1
                                  : static_cast<long long>(counts[c]);
    return t >= 1 && t <= hi;
  };

  while (total != target) {
    int dir = total > target ? -1 : +1;
    std::size_t pick = k;
    for (std::size_t c = 0; c < k; ++c) {
      if (!adjustable(c, dir)) continue;
      if (pick == k) { pick = c; continue; }
      // Undo the worst overshoot first; tie-break on larger class, then index.
      double a = dir < 0 ? err[c] : -err[c];
      double b = dir < 0 ? err[pick] : -err[pick];
      if (a > b || (a == b && counts[c] > counts[pick])) pick = c;
    }
    if (pick == k) break;  // nothing left to adjust; accept the drift
    train[pick] = static_cast<std::size_t>(static_cast<long long>(train[pick]) + dir);
    err[pick] += dir;
    total += dir;
  }
  return train;
}

}  // namespace detail

// Per-class 80/20-style split preserving class proportions. Deterministic for
// a fixed seed; classes with a single row land entirely in train (warned).
inline SplitPair stratified_split(const FeatureDataset& ds, double train_fraction,
                                  std::uint64_t seed) {
  if (ds.empty()) throw data_error("cannot split an empty dataset");
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw data_error("train_fraction must lie in (0,1)");

  auto counts = ds.class_counts();
  auto train_counts = detail::stratified_train_counts(counts, train_fraction);

  std::vector<std::vector<std::size_t>> by_class(ds.n_classes());
  for (std::size_t i = 0; i < ds.size(); ++i)
    by_class[ds.label(i)].push_back(i);

  SplitPair out;
  std::vector<std::size_t> train_idx, val_idx;
  for (std::size_t c = 0; c < ds.n_classes(); ++c) {
    auto& idx = by_class[c];
    if (idx.empty()) continue;
    rng_engine rng(seed + c);
    std::shuffle(idx.begin(), idx.end(), rng);
    train_idx.insert(train_idx.end(), idx.begin(),
                     idx.begin() + static_cast<std::ptrdiff_t>(train_counts[c]));
    val_idx.insert(val_idx.end(),
                   idx.begin() + static_cast<std::ptrdiff_t>(train_counts[c]),
                   idx.end());
    if (counts[c] == 1)
      out.warnings.push_back("class '" + ds.class_names()[c] +
                             "' has a single row; validation set gets none");
  }
  std::sort(train_idx.begin(), train_idx.end());
  std::sort(val_idx.begin(), val_idx.end());
  out.train = ds.subset(train_idx);
  out.val = ds.subset(val_idx);
  return out;
}

// Plain uniform split without stratification.
inline SplitPair uniform_split(const FeatureDataset& ds, double train_fraction,
                               std::uint64_t seed) {
  if (ds.size() < 2) throw data_error("cannot split fewer than 2 rows uniformly");
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw data_error("train_fraction must lie in (0,1)");
  std::vector<std::size_t> idx(ds.size());
  std::iota(idx.begin(), idx.end(), 0);
  rng_engine rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  auto n_train = static_cast<std::size_t>(
      std::floor(train_fraction * static_cast<double>(ds.size()) + 0.5));
  n_train = std::clamp<std::size_t>(n_train, 1, ds.size() - 1);
  std::vector<std::size_t> train_idx(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
  std::vector<std::size_t> val_idx(idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
  std::sort(train_idx.begin(), train_idx.end());
  std::sort(val_idx.begin(), val_idx.end());
  SplitPair out;
  out.train = ds.subset(train_idx);
  out.val = ds.subset(val_idx);
  return out;
}

struct BlobSpec {
  std::vector<double> center;
  double stddev = 1.0;
  std::size_t count = 0;
  std::string name;  // optional; "class<i>" when empty
};

// Isotropic Gaussian clusters, one class per spec entry. Deterministic per
// seed; a desk-scale stand-in for extracted image features.
inline FeatureDataset synth_blobs(const std::vector<BlobSpec>& spec,
                                  std::uint64_t seed) {
  if (spec.empty()) throw data_error("synth_blobs: empty spec");
  const std::size_t dim = spec.front().center.size();
  if (dim == 0) throw data_error("synth_blobs: zero-dimensional center");
  std::vector<std::string> names;
  for (std::size_t c = 0; c < spec.size(); ++c) {
    if (spec[c].center.size() != dim)
      throw data_error("synth_blobs: inconsistent center dimensions");
    if (!(spec[c].stddev > 0.0)) throw data_error("synth_blobs: stddev must be > 0");
    if (spec[c].count == 0) throw data_error("synth_blobs: count must be >= 1");
    names.push_back(spec[c].name.empty() ? "class" + std::to_string(c) : spec[c].name);
  }

  FeatureDataset out(dim, names);
  std::vector<double> x(dim);
  for (std::size_t c = 0; c < spec.size(); ++c) {
    rng_engine rng(seed + c);
    std::normal_distribution<double> gauss(0.0, spec[c].stddev);
    for (std::size_t i = 0; i < spec[c].count; ++i) {
      for (std::size_t d = 0; d < dim; ++d) x[d] = spec[c].center[d] + gauss(rng);
      out.push_row(x, static_cast<std::uint32_t>(c));
    }
  }
  return out;
}

}  // namespace rbml
