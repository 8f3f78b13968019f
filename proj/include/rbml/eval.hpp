#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rbml/classifier.hpp"
#include "rbml/dataset.hpp"

namespace rbml {

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
};

struct RocCurve {
  std::vector<RocPoint> points;  // from (0,0) to (1,1)
  double auc = 0.0;
};

// Per-class accuracy is recall: confusion[c][c] / row_sum(c). Classes absent
// from the eval set report an empty accuracy and ROC instead of a silent 0.
struct EvalReport {
  std::string eval_set_name;
  std::size_t n = 0;
  double overall_accuracy = 0.0;
  std::vector<std::optional<double>> per_class_accuracy;
  std::vector<std::vector<std::size_t>> confusion;  // rows = true, cols = predicted
  std::vector<std::optional<RocCurve>> roc;
};

// One-vs-rest ROC sweep over the distinct scores of column `cls`; tied scores
// collapse into a single threshold step. AUC by trapezoid. Returns nothing
// when the class has no positives or no negatives.
inline std::optional<RocCurve> roc_auc(std::span<const double> scores,
                                       std::size_t n_classes,
                                       std::span<const std::uint32_t> labels,
                                       std::size_t cls) {
  const std::size_t n = labels.size();
  if (scores.size() != n * n_classes)
    throw data_error("roc_auc: score matrix shape mismatch");

  std::vector<std::pair<double, bool>> ranked;  // (score, is_positive)
  ranked.reserve(n);
  std::size_t positives = 0;
  for (std::size_t i = 0; i < n; ++i) {
    bool pos = labels[i] == cls;
    positives += pos;
    ranked.emplace_back(scores[i * n_classes + cls], pos);
  }
  std::size_t negatives = n - positives;
  if (positives == 0 || negatives == 0) return std::nullopt;

  std::sort(ranked.begin(), ranked.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });

  RocCurve curve;
  curve.points.push_back({0.0, 0.0});
  std::size_t tp = 0, fp = 0;
  std::size_t i = 0;
  while (i < n) {
    double s = ranked[i].first;
    while (i < n && ranked[i].first == s) {
      if (ranked[i].second)
        ++tp;
      else
        ++fp;
      ++i;
    }
    curve.points.push_back({static_cast<double>(fp) / static_cast<double>(negatives),
                            static_cast<double>(tp) / static_cast<double>(positives)});
  }

  double auc = 0.0;
  for (std::size_t p = 1; p < curve.points.size(); ++p) {
    const auto& a = curve.points[p - 1];
    const auto& b = curve.points[p];
    auc += (b.fpr - a.fpr) * (a.tpr + b.tpr) * 0.5;
  }
  curve.auc = auc;
  return curve;
}

// Full probability matrix of a model over a dataset, row-major N x K.
inline std::vector<double> score_matrix(const Classifier& model,
                                        const FeatureDataset& ds) {
  const std::size_t k = model.n_classes();
  std::vector<double> scores(ds.size() * k);
  for (std::size_t i = 0; i < ds.size(); ++i)
    model.predict_proba_into(ds.row(i), {scores.data() + i * k, k});
  return scores;
}

inline EvalReport evaluate(const Classifier& model, const FeatureDataset& ds,
                           const std::string& name) {
  if (ds.empty()) throw data_error("evaluate: empty eval set");
  if (model.n_features() != ds.dim())
    throw data_error("evaluate: feature dimension mismatch");
  if (model.n_classes() != ds.n_classes())
    throw data_error("evaluate: class count mismatch");

  const std::size_t k = ds.n_classes();
  EvalReport rep;
  rep.eval_set_name = name;
  rep.n = ds.size();
  rep.confusion.assign(k, std::vector<std::size_t>(k, 0));

  auto scores = score_matrix(model, ds);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    std::size_t pred = argmax({scores.data() + i * k, k});
    rep.confusion[ds.label(i)][pred]++;
    if (pred == ds.label(i)) ++hits;
  }
  rep.overall_accuracy = static_cast<double>(hits) / static_cast<double>(ds.size());

  rep.per_class_accuracy.resize(k);
  rep.roc.resize(k);
  for (std::size_t c = 0; c < k; ++c) {
    std::size_t row_sum = 0;
    for (std::size_t j = 0; j < k; ++j) row_sum += rep.confusion[c][j];
    if (row_sum > 0)
      rep.per_class_accuracy[c] = static_cast<double>(rep.confusion[c][c]) /
                                  static_cast<double>(row_sum);
    rep.roc[c] = roc_auc(scores, k, ds.labels(), c);
  }
  return rep;
}

}  // namespace rbml
