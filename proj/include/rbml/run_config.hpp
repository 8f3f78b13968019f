#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rbml/dataset_io.hpp"
#include "rbml/grid.hpp"
#include "rbml/model_io.hpp"
#include "rbml/presets.hpp"

namespace rbml {

inline ModelParams model_params_from_json(const nlohmann::json& j) {
  ModelParams p;
  p.family = j.at("family").get<std::string>();
  p.n_estimators = j.value("n_estimators", p.n_estimators);
  p.learning_rate = j.value("learning_rate", p.learning_rate);
  p.max_samples = j.value("max_samples", p.max_samples);
  if (j.contains("max_depth") && !j.at("max_depth").is_null())
    p.max_depth = j.at("max_depth").get<int>();
  return p;
}

inline GridSpec grid_from_json(const nlohmann::json& j) {
  if (j.contains("preset")) return presets::grid_preset(j.at("preset").get<std::string>());
  GridSpec g;
  g.family = j.at("family").get<std::string>();
  if (j.contains("variants")) {
    g.variants.clear();
    for (const auto& v : j.at("variants"))
      g.variants.push_back(variant_kind_from_string(v.get<std::string>()));
  }
  if (j.contains("n_estimators"))
    g.n_estimators = j.at("n_estimators").get<std::vector<std::size_t>>();
  if (j.contains("learning_rates"))
    g.learning_rates = j.at("learning_rates").get<std::vector<double>>();
  if (j.contains("max_samples"))
    g.max_samples = j.at("max_samples").get<std::vector<double>>();
  if (j.contains("max_depths")) {
    g.max_depths.clear();
    for (const auto& d : j.at("max_depths"))
      g.max_depths.push_back(d.is_null() ? std::optional<int>{} : std::optional<int>{d.get<int>()});
  }
  return g;
}

// Declarative run description: input files, variant recipe, model or grid,
// and named eval pools. Relative paths resolve against the config location.
struct RunConfig {
  std::uint64_t seed = 0;
  std::filesystem::path original;
  std::vector<std::filesystem::path> extras;
  std::optional<std::filesystem::path> label_map;
  VariantSpec variant;
  nlohmann::json model;  // family-specific params, may describe a voting stack
  std::optional<GridSpec> grid;
  struct PoolPaths {
    std::string name;
    std::filesystem::path val;
    std::filesystem::path test;
  };
  std::vector<PoolPaths> eval_pools;
  std::string primary_eval;
  std::size_t top_k = 3;
};

inline RunConfig parse_run_config(const nlohmann::json& j,
                                  const std::filesystem::path& base_dir) {
  auto resolve = [&](const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() ? path : base_dir / path;
  };

  RunConfig cfg;
  cfg.seed = j.value("seed", std::uint64_t{0});
  const auto& data = j.at("data");
  cfg.original = resolve(data.at("original").get<std::string>());
  if (data.contains("extras"))
    for (const auto& e : data.at("extras"))
      cfg.extras.push_back(resolve(e.get<std::string>()));
  if (data.contains("label_map"))
    cfg.label_map = resolve(data.at("label_map").get<std::string>());

  if (j.contains("variant")) cfg.variant = variant_spec_from_json(j.at("variant"));
  if (cfg.variant.seed == 0) cfg.variant.seed = cfg.seed;
  if (j.contains("model")) cfg.model = j.at("model");
  if (j.contains("grid")) cfg.grid = grid_from_json(j.at("grid"));

  if (j.contains("eval_pools"))
    for (const auto& p : j.at("eval_pools"))
      cfg.eval_pools.push_back({p.at("name").get<std::string>(),
                                resolve(p.at("val").get<std::string>()),
                                resolve(p.at("test").get<std::string>())});
  cfg.primary_eval = j.value("primary_eval", std::string{});
  cfg.top_k = j.value("top_k", cfg.top_k);
  return cfg;
}

inline RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open config: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw data_error("invalid config JSON: " + std::string(e.what()));
  }
  return parse_run_config(j, path.parent_path());
}

struct RunInputs {
  FeatureDataset original;
  std::optional<FeatureDataset> extras;  // all extra files, tagged per file
  std::vector<EvalPool> pools;
};

// Loads every dataset a run references. Extra source files get provenance
// tags 1, 2, ... in file order; class tables must agree across all files.
inline RunInputs load_run_inputs(const RunConfig& cfg) {
  std::optional<std::vector<std::string>> label_map;
  if (cfg.label_map) label_map = load_label_map(*cfg.label_map);

  RunInputs in;
  in.original = load_features(cfg.original, label_map);

  const auto& names = in.original.class_names();
  auto check_names = [&](const FeatureDataset& ds, const std::filesystem::path& p) {
    if (ds.class_names() != names)
      throw data_error("class table of " + p.string() +
                       " does not match the original dataset; use a label map");
  };

  for (std::size_t i = 0; i < cfg.extras.size(); ++i) {
    auto ds = load_features(cfg.extras[i], label_map.has_value()
                                               ? label_map
                                               : std::optional<std::vector<std::string>>{names});
    check_names(ds, cfg.extras[i]);
    FeatureDataset tagged(ds.dim(), ds.class_names());
    for (std::size_t r = 0; r < ds.size(); ++r)
      tagged.push_row(ds.row(r), ds.label(r), static_cast<std::uint8_t>(i + 1));
    in.extras = in.extras ? concat(*in.extras, tagged) : std::move(tagged);
  }

  for (const auto& pool : cfg.eval_pools) {
    EvalPool p;
    p.name = pool.name;
    p.val = load_features(pool.val, label_map.has_value()
                                        ? label_map
                                        : std::optional<std::vector<std::string>>{names});
    p.test = load_features(pool.test, label_map.has_value()
                                          ? label_map
                                          : std::optional<std::vector<std::string>>{names});
    check_names(p.val, pool.val);
    check_names(p.test, pool.test);
    in.pools.push_back(std::move(p));
  }
  return in;
}

// Trains the model a config describes, including soft-voting stacks whose
// members are trained on the same data.
inline std::shared_ptr<const Classifier> train_from_config(const nlohmann::json& model,
                                                           const FeatureDataset& train,
                                                           std::uint64_t seed) {
  const std::string family = model.at("family").get<std::string>();
  if (family == "voting") {
    std::vector<std::shared_ptr<const Classifier>> members;
    std::size_t idx = 0;
    for (const auto& mj : model.at("members"))
      members.push_back(
          train_from_config(mj, train, mix_seed(seed, 0x766f74 + idx++)));
    std::vector<double> weights;
    if (model.contains("weights"))
      weights = model.at("weights").get<std::vector<double>>();
    return std::make_shared<VotingModel>(std::move(members), std::move(weights));
  }
  return train_model(train, model_params_from_json(model), seed);
}

}  // namespace rbml
