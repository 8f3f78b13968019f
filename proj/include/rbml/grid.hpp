#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <future>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rbml/ensemble.hpp"
#include "rbml/eval.hpp"
#include "rbml/rebalance.hpp"

namespace rbml {

// Named evaluation pool with paired validation/test sets, reported as two
// accuracy columns per pool.
struct EvalPool {
  std::string name;
  FeatureDataset val;
  FeatureDataset test;
};

// One concrete training configuration.
struct ModelParams {
  std::string family = "adaboost";  // "forest" | "adaboost"
  std::size_t n_estimators = 100;
  double learning_rate = 0.5;   // adaboost only
  double max_samples = 0.75;    // forest only
  std::optional<int> max_depth;
};

inline std::shared_ptr<const Classifier> train_model(const FeatureDataset& train,
                                                     const ModelParams& p,
                                                     std::uint64_t seed) {
  if (p.family == "forest")
    return std::make_shared<ForestModel>(
        fit_forest(train, p.n_estimators, p.max_samples, p.max_depth, seed));
  if (p.family == "adaboost")
    return std::make_shared<BoostModel>(
        fit_adaboost(train, p.n_estimators, p.learning_rate, p.max_depth, seed));
  throw train_error("model family must be 'forest' or 'adaboost', got '" + p.family + "'");
}

// Cartesian grid over variants and the family-relevant hyperparameter axes.
struct GridSpec {
  std::string family = "adaboost";
  std::vector<VariantKind> variants{VariantKind::original};
  std::vector<std::size_t> n_estimators{100};
  std::vector<double> learning_rates{0.5};                  // adaboost axis
  std::vector<double> max_samples{0.75};                    // forest axis
  std::vector<std::optional<int>> max_depths{std::nullopt};
};

struct GridCell {
  std::size_t index = 0;
  VariantKind variant = VariantKind::original;
  ModelParams params;
};

inline std::vector<GridCell> expand_grid(const GridSpec& g) {
  if (g.variants.empty() || g.n_estimators.empty() || g.max_depths.empty())
    throw data_error("grid axes must be non-empty");
  const auto& third = g.family == "forest" ? g.max_samples : g.learning_rates;
  if (third.empty()) throw data_error("grid axes must be non-empty");

  std::vector<GridCell> cells;
  for (auto variant : g.variants)
    for (auto n_est : g.n_estimators)
      for (double x : third)
        for (auto depth : g.max_depths) {
          GridCell c;
          c.index = cells.size();
          c.variant = variant;
          c.params.family = g.family;
          c.params.n_estimators = n_est;
          if (g.family == "forest")
            c.params.max_samples = x;
          else
            c.params.learning_rate = x;
          c.params.max_depth = depth;
          cells.push_back(c);
        }
  return cells;
}

// Readable cell label in the [dataset; estimators; rate; depth] table style.
inline std::string cell_label(const GridCell& c) {
  std::string depth = c.params.max_depth ? std::to_string(*c.params.max_depth) : "none";
  std::string third = c.params.family == "forest"
                          ? "ms=" + std::to_string(c.params.max_samples).substr(0, 5)
                          : "lr=" + std::to_string(c.params.learning_rate).substr(0, 5);
  return "[" + std::string(to_string(c.variant)) + "; " +
         std::to_string(c.params.n_estimators) + "; " + third + "; depth=" + depth + "]";
}

struct PoolScores {
  EvalReport val;
  EvalReport test;
};

struct CellResult {
  GridCell cell;
  bool ok = false;
  std::string error;
  std::vector<std::pair<std::string, PoolScores>> pools;
};

struct GridRunConfig {
  GridSpec grid;
  std::uint64_t seed = 0;
  std::string primary_eval;     // pool whose val accuracy ranks the cells
  VariantSpec variant_defaults; // smote_k / theta / target; kind set per cell
  std::size_t jobs = 1;
  std::size_t top_k = 3;
};

inline double primary_val_accuracy(const CellResult& r, const std::string& pool) {
  for (const auto& [name, scores] : r.pools)
    if (name == pool) return scores.val.overall_accuracy;
  return -1.0;
}

// Trains every cell, evaluates on every pool and ranks by validation accuracy
// of the primary pool. Per-cell failures are recorded, never fatal. Variant
// datasets are built once per kind with kind-derived seeds; cells use
// index-derived seeds, so parallel execution equals serial execution.
inline std::vector<CellResult> run_gridsearch(const FeatureDataset& original,
                                              const FeatureDataset* extras,
                                              const std::vector<EvalPool>& pools,
                                              const GridRunConfig& cfg) {
  if (pools.empty()) throw data_error("gridsearch needs at least one eval pool");
  auto cells = expand_grid(cfg.grid);

  std::string primary = cfg.primary_eval.empty() ? pools.front().name : cfg.primary_eval;
  bool primary_found = false;
  for (const auto& p : pools) primary_found |= p.name == primary;
  if (!primary_found) throw data_error("primary_eval pool '" + primary + "' not configured");

  // one variant build per kind used by the grid
  std::vector<std::optional<FeatureDataset>> variants(6);
  for (const auto& cell : cells) {
    auto k = static_cast<std::size_t>(cell.variant);
    if (variants[k]) continue;
    VariantSpec vs = cfg.variant_defaults;
    vs.kind = cell.variant;
    vs.seed = cfg.seed + k;
    variants[k] = build_variant(original, extras, vs);
  }

  auto run_cell = [&](const GridCell& cell) {
    CellResult res;
    res.cell = cell;
    try {
      const auto& train = *variants[static_cast<std::size_t>(cell.variant)];
      auto model = train_model(train, cell.params, mix_seed(cfg.seed, cell.index));
      for (const auto& pool : pools) {
        PoolScores s;
        s.val = evaluate(*model, pool.val, pool.name + "/val");
        s.test = evaluate(*model, pool.test, pool.name + "/test");
        res.pools.emplace_back(pool.name, std::move(s));
      }
      res.ok = true;
    } catch (const std::exception& e) {
      res.ok = false;
      res.error = e.what();
      res.pools.clear();
    }
    return res;
  };

  std::vector<CellResult> results(cells.size());
  if (cfg.jobs <= 1) {
    for (std::size_t i = 0; i < cells.size(); ++i) results[i] = run_cell(cells[i]);
  } else {
    std::vector<std::future<void>> workers;
    std::atomic<std::size_t> next{0};
    for (std::size_t j = 0; j < std::min(cfg.jobs, cells.size()); ++j)
      workers.push_back(std::async(std::launch::async, [&] {
        for (std::size_t i = next.fetch_add(1); i < cells.size(); i = next.fetch_add(1))
          results[i] = run_cell(cells[i]);
      }));
    for (auto& f : workers) f.get();
  }

  std::stable_sort(results.begin(), results.end(),
                   [&](const CellResult& a, const CellResult& b) {
                     if (a.ok != b.ok) return a.ok;
                     double va = primary_val_accuracy(a, primary);
                     double vb = primary_val_accuracy(b, primary);
                     if (va != vb) return va > vb;
                     return a.cell.index < b.cell.index;
                   });
  return results;
}

}  // namespace rbml
