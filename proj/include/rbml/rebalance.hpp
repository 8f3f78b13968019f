#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "rbml/dataset.hpp"

namespace rbml {

struct SmoteParams {
  std::size_t k = 5;
  // Desired count per class; 0 leaves the class unchanged. Nonzero targets
  // must be >= the current count.
  std::vector<std::size_t> per_class_target;
  std::uint64_t seed = 0;
};

namespace detail {

// Indices of the k nearest same-class neighbors of each member, ties broken
// by lower index. Exact full scan; class sizes stay in the tens of thousands.
inline std::vector<std::vector<std::size_t>> knn_within(
    const FeatureDataset& ds, const std::vector<std::size_t>& members,
    std::size_t k) {
  const std::size_t n = members.size();
  std::vector<std::vector<std::size_t>> nn(n);
  std::vector<std::pair<double, std::size_t>> best;
  for (std::size_t a = 0; a < n; ++a) {
    best.clear();
    auto xa = ds.row(members[a]);
    for (std::size_t b = 0; b < n; ++b) {
      if (b == a) continue;
      auto xb = ds.row(members[b]);
      double d2 = 0.0;
      for (std::size_t j = 0; j < xa.size(); ++j) {
        double diff = xa[j] - xb[j];
        d2 += diff * diff;
      }
      std::pair<double, std::size_t> cand{d2, b};
      if (best.size() < k) {
        best.push_back(cand);
        std::push_heap(best.begin(), best.end());
      } else if (cand < best.front()) {
        std::pop_heap(best.begin(), best.end());
        best.back() = cand;
        std::push_heap(best.begin(), best.end());
      }
    }
    std::sort(best.begin(), best.end());
    nn[a].reserve(best.size());
    for (auto& [d2, b] : best) nn[a].push_back(b);
  }
  return nn;
}

}  // namespace detail

// Synthetic minority oversampling: each synthetic row is x + delta * (nn - x)
// for a real class member x, one of its k nearest same-class neighbors nn and
// delta uniform in [0,1]. Original rows are preserved verbatim; synthetic rows
// are appended and tagged kSyntheticTag. Per-class draws use seed + class
// index, so classes can be synthesized independently.
inline FeatureDataset smote(const FeatureDataset& ds, const SmoteParams& params) {
  if (params.k < 1) throw data_error("smote: k must be >= 1");
  if (params.per_class_target.size() != ds.n_classes())
    throw data_error("smote: per_class_target length must equal K");

  auto counts = ds.class_counts();
  for (std::size_t c = 0; c < counts.size(); ++c) {
    std::size_t target = params.per_class_target[c];
    if (target == 0) continue;
    if (target < counts[c])
      throw data_error("smote: target for class '" + ds.class_names()[c] +
                       "' is below its current count");
    if (target > counts[c] && counts[c] < 2)
      throw data_error("smote: class '" + ds.class_names()[c] + "' has " +
                       std::to_string(counts[c]) +
                       " sample(s); need at least 2 to synthesize");
  }

  FeatureDataset out(ds.dim(), ds.class_names());
  for (std::size_t i = 0; i < ds.size(); ++i)
    out.push_row(ds.row(i), ds.label(i), ds.tag(i));

  std::vector<std::vector<std::size_t>> by_class(ds.n_classes());
  for (std::size_t i = 0; i < ds.size(); ++i) by_class[ds.label(i)].push_back(i);

  std::vector<double> synth(ds.dim());
  for (std::size_t c = 0; c < ds.n_classes(); ++c) {
    std::size_t target = params.per_class_target[c];
    if (target == 0 || target <= counts[c]) continue;

    const auto& members = by_class[c];
    std::size_t k_eff = std::min(params.k, members.size() - 1);
    auto nn = detail::knn_within(ds, members, k_eff);

    rng_engine rng(params.seed + c);
    std::uniform_int_distribution<std::size_t> pick_base(0, members.size() - 1);
    std::uniform_int_distribution<std::size_t> pick_nn(0, k_eff - 1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    for (std::size_t s = counts[c]; s < target; ++s) {
      std::size_t a = pick_base(rng);
      std::size_t b = nn[a][pick_nn(rng)];
      double delta = unit(rng);
      auto xa = ds.row(members[a]);
      auto xb = ds.row(members[b]);
      for (std::size_t j = 0; j < ds.dim(); ++j)
        synth[j] = xa[j] + delta * (xb[j] - xa[j]);
      out.push_row(synth, static_cast<std::uint32_t>(c), kSyntheticTag);
    }
  }
  return out;
}

// Caps every class at `cap` rows via uniform sampling without replacement.
// Retained rows keep their original relative order.
inline FeatureDataset undersample(const FeatureDataset& ds, std::size_t cap,
                                  std::uint64_t seed) {
  if (cap < 1) throw data_error("undersample: cap must be >= 1");

  std::vector<std::vector<std::size_t>> by_class(ds.n_classes());
  for (std::size_t i = 0; i < ds.size(); ++i) by_class[ds.label(i)].push_back(i);

  std::vector<std::size_t> keep;
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    auto& idx = by_class[c];
    if (idx.size() > cap) {
      rng_engine rng(seed + c);
      // partial Fisher-Yates: first `cap` entries are a uniform subset
      for (std::size_t i = 0; i < cap; ++i) {
        std::uniform_int_distribution<std::size_t> d(i, idx.size() - 1);
        std::swap(idx[i], idx[d(rng)]);
      }
      idx.resize(cap);
    }
    keep.insert(keep.end(), idx.begin(), idx.end());
  }
  std::sort(keep.begin(), keep.end());
  return ds.subset(keep);
}

enum class VariantKind {
  original,
  combined,
  smote,
  smote_combined,
  smote_partial,
  balanced,
};

inline const char* to_string(VariantKind kind) {
  switch (kind) {
    case VariantKind::original: return "original";
    case VariantKind::combined: return "combined";
    case VariantKind::smote: return "smote";
    case VariantKind::smote_combined: return "smote_combined";
    case VariantKind::smote_partial: return "smote_partial";
    case VariantKind::balanced: return "balanced";
  }
  return "?";
}

inline VariantKind variant_kind_from_string(const std::string& s) {
  if (s == "original") return VariantKind::original;
  if (s == "combined") return VariantKind::combined;
  if (s == "smote") return VariantKind::smote;
  if (s == "smote_combined") return VariantKind::smote_combined;
  if (s == "smote_partial") return VariantKind::smote_partial;
  if (s == "balanced") return VariantKind::balanced;
  throw data_error("unknown variant kind: " + s);
}

struct VariantSpec {
  VariantKind kind = VariantKind::original;
  std::size_t smote_k = 5;
  double partial_theta = 0.25;       // smote_partial: raise classes below
                                     // theta * majority up to ceil(theta * majority)
  std::size_t balanced_target = 2000;
  std::uint64_t seed = 0;
};

// Row-union of two datasets sharing dimension and class table.
inline FeatureDataset concat(const FeatureDataset& a, const FeatureDataset& b) {
  if (a.dim() != b.dim()) throw data_error("concat: feature dimension mismatch");
  if (a.class_names() != b.class_names())
    throw data_error("concat: class tables differ; load with a shared label map");
  FeatureDataset out(a.dim(), a.class_names());
  for (std::size_t i = 0; i < a.size(); ++i) out.push_row(a.row(i), a.label(i), a.tag(i));
  for (std::size_t i = 0; i < b.size(); ++i) out.push_row(b.row(i), b.label(i), b.tag(i));
  return out;
}

// Builds one of the six training-set variants. extras holds the additional
// source rows and is required for combined, smote_combined and balanced.
inline FeatureDataset build_variant(const FeatureDataset& original,
                                    const FeatureDataset* extras,
                                    const VariantSpec& spec) {
  const bool needs_extras = spec.kind == VariantKind::combined ||
                            spec.kind == VariantKind::smote_combined ||
                            spec.kind == VariantKind::balanced;
  if (needs_extras && (extras == nullptr || extras->empty()))
    throw data_error(std::string("variant '") + to_string(spec.kind) +
                     "' requires extra source rows");

  auto majority = [](const std::vector<std::size_t>& counts) {
    return *std::max_element(counts.begin(), counts.end());
  };
  auto full_targets = [&](const FeatureDataset& ds) {
    auto counts = ds.class_counts();
    return std::vector<std::size_t>(counts.size(), majority(counts));
  };

  switch (spec.kind) {
    case VariantKind::original:
      return original;
    case VariantKind::combined:
      return concat(original, *extras);
    case VariantKind::smote:
      return smote(original, {spec.smote_k, full_targets(original), spec.seed});
    case VariantKind::smote_combined: {
      auto base = concat(original, *extras);
      return smote(base, {spec.smote_k, full_targets(base), spec.seed});
    }
    case VariantKind::smote_partial: {
      if (!(spec.partial_theta > 0.0 && spec.partial_theta <= 1.0))
        throw data_error("smote_partial: theta must lie in (0,1]");
      FeatureDataset base = (extras != nullptr && !extras->empty())
                                ? concat(original, *extras)
                                : original;
      auto counts = base.class_counts();
      double cutoff = spec.partial_theta * static_cast<double>(majority(counts));
      auto raised = static_cast<std::size_t>(std::ceil(cutoff));
      std::vector<std::size_t> targets(counts.size(), 0);
      for (std::size_t c = 0; c < counts.size(); ++c)
        if (static_cast<double>(counts[c]) < cutoff) targets[c] = raised;
      return smote(base, {spec.smote_k, targets, spec.seed});
    }
    case VariantKind::balanced: {
      if (spec.balanced_target < 1)
        throw data_error("balanced: target must be >= 1");
      auto base = concat(original, *extras);
      auto counts = base.class_counts();
      std::vector<std::size_t> targets(counts.size(), 0);
      for (std::size_t c = 0; c < counts.size(); ++c)
        if (counts[c] < spec.balanced_target) targets[c] = spec.balanced_target;
      auto up = smote(base, {spec.smote_k, targets, spec.seed});
      return undersample(up, spec.balanced_target, spec.seed + 1);
    }
  }
  throw data_error("unreachable variant kind");
}

}  // namespace rbml
