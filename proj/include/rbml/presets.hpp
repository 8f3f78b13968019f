#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "rbml/dataset.hpp"
#include "rbml/grid.hpp"

namespace rbml::presets {

// Bundled 16-class vehicle corpus profile: class names and per-source
// training row counts (primary crawl, curated additions, web search).
inline constexpr std::size_t kVehicleClassCount = 16;

inline const std::array<const char*, kVehicleClassCount>& vehicle16_names() {
  static const std::array<const char*, kVehicleClassCount> names = {
      "Ambulance", "Barge",      "Bicycle", "Boat",       "Bus",     "Car",
      "Cart",      "Helicopter", "Limousine", "Motorcycle", "Segway",
      "Snowmobile", "Tank",      "Taxi",    "Truck",      "Van"};
  return names;
}

struct SourceCounts {
  std::array<std::size_t, kVehicleClassCount> primary;
  std::array<std::size_t, kVehicleClassCount> curated;
  std::array<std::size_t, kVehicleClassCount> crawled;
};

inline const SourceCounts& vehicle16_train_counts() {
  static const SourceCounts counts = {
      // primary
      {88, 160, 1496, 7909, 1782, 5390, 22, 517, 11, 2189, 88, 77, 121, 527, 1474, 715},
      // curated
      {1300, 0, 1300, 0, 1300, 0, 2600, 0, 1300, 0, 0, 1300, 1300, 1300, 1300, 2459},
      // crawled
      {0, 270, 0, 0, 0, 0, 0, 232, 0, 0, 232, 0, 0, 0, 0, 0}};
  return counts;
}

inline std::array<std::size_t, kVehicleClassCount> vehicle16_combined_counts() {
  const auto& c = vehicle16_train_counts();
  std::array<std::size_t, kVehicleClassCount> out{};
  for (std::size_t i = 0; i < kVehicleClassCount; ++i)
    out[i] = c.primary[i] + c.curated[i] + c.crawled[i];
  return out;
}

// Gaussian blobs shaped like the corpus profile: one cluster per class with
// the requested per-class counts. The class table always carries all 16 names
// (a source may have zero rows of a class), so datasets generated from
// different sources of the same profile can be combined directly. Cluster
// centers depend only on (seed, dim), not on the counts, so the sources of
// one profile share the same geometry per class.
inline FeatureDataset vehicle16_blobs(
    const std::array<std::size_t, kVehicleClassCount>& counts, std::size_t dim,
    std::uint64_t seed, double spread = 1.0) {
  std::vector<std::string> names(vehicle16_names().begin(), vehicle16_names().end());
  FeatureDataset out(dim, names);
  rng_engine center_rng(seed);
  std::uniform_real_distribution<double> unit(-4.0, 4.0);
  std::vector<double> center(dim), row(dim);
  for (std::size_t c = 0; c < kVehicleClassCount; ++c) {
    for (auto& v : center) v = unit(center_rng);
    if (counts[c] == 0) continue;
    rng_engine rng(mix_seed(seed, c));
    std::normal_distribution<double> gauss(0.0, spread);
    for (std::size_t i = 0; i < counts[c]; ++i) {
      for (std::size_t j = 0; j < dim; ++j) row[j] = center[j] + gauss(rng);
      out.push_row(row, static_cast<std::uint32_t>(c));
    }
  }
  return out;
}

// Built-in grid stages for the boosted classifier, coarse-to-fine:
// stage 1 sweeps estimators and learning rate with stumps, stage 2 narrows
// the search while deepening the base trees, stage 3 fixes the budget and
// compares the six training variants.
inline GridSpec ada_stage1() {
  GridSpec g;
  g.family = "adaboost";
  g.variants = {VariantKind::original, VariantKind::combined};
  g.n_estimators = {5, 10, 20, 30, 40, 50, 70, 100, 200};
  g.learning_rates = {1e-3, 1e-2, 5e-2, 0.1, 0.2, 0.5, 0.7, 1.0};
  g.max_depths = {1};
  return g;
}

inline GridSpec ada_stage2() {
  GridSpec g;
  g.family = "adaboost";
  g.variants = {VariantKind::original, VariantKind::combined};
  g.n_estimators = {100, 150, 200};
  g.learning_rates = {0.1, 0.2, 0.5};
  g.max_depths = {2, 3, 4, 5, 6, 7, 8, 9, 10};
  return g;
}

inline GridSpec ada_stage3() {
  GridSpec g;
  g.family = "adaboost";
  g.variants = {VariantKind::original,      VariantKind::smote,
                VariantKind::combined,      VariantKind::smote_combined,
                VariantKind::smote_partial, VariantKind::balanced};
  g.n_estimators = {100};
  g.learning_rates = {0.1, 0.2, 0.5};
  g.max_depths = {2, 3, 4, 5, 6, 7, 8, 9, 10};
  return g;
}

// Forest tuning sweeps: estimator count at the chosen sampling fraction, then
// the sampling fraction at the chosen estimator count.
inline GridSpec rf_estimators() {
  GridSpec g;
  g.family = "forest";
  g.variants = {VariantKind::original};
  g.n_estimators = {5, 10, 20, 50, 100, 200, 300};
  g.max_samples = {0.75};
  g.max_depths = {std::nullopt};
  return g;
}

inline GridSpec rf_max_samples() {
  GridSpec g;
  g.family = "forest";
  g.variants = {VariantKind::original};
  g.n_estimators = {200};
  g.max_samples = {0.25, 0.5, 0.625, 0.75, 0.875, 1.0};
  g.max_depths = {std::nullopt};
  return g;
}

inline GridSpec grid_preset(const std::string& name) {
  if (name == "ada-stage1") return ada_stage1();
  if (name == "ada-stage2") return ada_stage2();
  if (name == "ada-stage3") return ada_stage3();
  if (name == "rf-estimators") return rf_estimators();
  if (name == "rf-max-samples") return rf_max_samples();
  throw data_error("unknown grid preset: " + name);
}

}  // namespace rbml::presets
