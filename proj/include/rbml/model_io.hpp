#pragma once

#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rbml/ensemble.hpp"
#include "rbml/rebalance.hpp"

namespace rbml {

inline constexpr int kModelFormatVersion = 1;

// Write-temp-then-rename so readers never observe a partial file.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw data_error("cannot write file: " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw data_error("write failed: " + tmp.string());
  }
  fs::rename(tmp, path);
}

inline nlohmann::json to_json(const VariantSpec& v) {
  return {{"kind", to_string(v.kind)},
          {"smote_k", v.smote_k},
          {"partial_theta", v.partial_theta},
          {"balanced_target", v.balanced_target},
          {"seed", v.seed}};
}

inline VariantSpec variant_spec_from_json(const nlohmann::json& j) {
  VariantSpec v;
  v.kind = variant_kind_from_string(j.value("kind", "original"));
  v.smote_k = j.value("smote_k", v.smote_k);
  v.partial_theta = j.value("partial_theta", v.partial_theta);
  v.balanced_target = j.value("balanced_target", v.balanced_target);
  v.seed = j.value("seed", v.seed);
  return v;
}

// Per-class before/after accounting for a built variant.
inline nlohmann::json variant_manifest(const VariantSpec& spec,
                                       const FeatureDataset& before,
                                       const FeatureDataset& after) {
  nlohmann::json j;
  j["kind"] = to_string(spec.kind);
  j["params"] = to_json(spec);
  j["classes"] = before.class_names();
  j["before"] = before.class_counts();
  j["after"] = after.class_counts();
  std::size_t synthetic = 0;
  for (std::size_t i = 0; i < after.size(); ++i)
    if (after.tag(i) == kSyntheticTag) ++synthetic;
  j["synthetic_rows"] = synthetic;
  return j;
}

namespace detail {

inline std::string bits_to_hex(const std::vector<bool>& bits) {
  std::string hex;
  hex.reserve((bits.size() + 3) / 4);
  static const char* digits = "0123456789abcdef";
  for (std::size_t i = 0; i < bits.size(); i += 4) {
    int nibble = 0;
    for (std::size_t b = 0; b < 4 && i + b < bits.size(); ++b)
      if (bits[i + b]) nibble |= 1 << b;
    hex.push_back(digits[nibble]);
  }
  return hex;
}

inline std::vector<bool> hex_to_bits(const std::string& hex, std::size_t n) {
  std::vector<bool> bits(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    char ch = hex.at(i / 4);
    int nibble = ch <= '9' ? ch - '0' : ch - 'a' + 10;
    bits[i] = (nibble >> (i % 4)) & 1;
  }
  return bits;
}

inline nlohmann::json tree_to_json(const TreeModel& tree) {
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& n : tree.nodes()) {
    if (n.feature < 0)
      nodes.push_back({{"p", n.probs}});
    else
      nodes.push_back({{"f", n.feature}, {"t", n.threshold}, {"l", n.left}, {"r", n.right}});
  }
  nlohmann::json j;
  j["n_features"] = tree.n_features();
  j["n_classes"] = tree.n_classes();
  if (tree.max_depth())
    j["max_depth"] = *tree.max_depth();
  else
    j["max_depth"] = nullptr;
  j["nodes"] = std::move(nodes);
  return j;
}

inline TreeModel tree_from_json(const nlohmann::json& j) {
  std::vector<TreeNode> nodes;
  for (const auto& nj : j.at("nodes")) {
    TreeNode n;
    if (nj.contains("p")) {
      n.probs = nj.at("p").get<std::vector<double>>();
    } else {
      n.feature = nj.at("f").get<std::int32_t>();
      n.threshold = nj.at("t").get<double>();
      n.left = nj.at("l").get<std::uint32_t>();
      n.right = nj.at("r").get<std::uint32_t>();
    }
    nodes.push_back(std::move(n));
  }
  std::optional<int> depth;
  if (!j.at("max_depth").is_null()) depth = j.at("max_depth").get<int>();
  return TreeModel(j.at("n_features").get<std::size_t>(),
                   j.at("n_classes").get<std::size_t>(), depth, std::move(nodes));
}

}  // namespace detail

inline nlohmann::json model_to_json(const Classifier& model) {
  nlohmann::json j;
  if (const auto* tree = dynamic_cast<const TreeModel*>(&model)) {
    j["kind"] = "tree";
    j["state"] = detail::tree_to_json(*tree);
  } else if (const auto* forest = dynamic_cast<const ForestModel*>(&model)) {
    j["kind"] = "forest";
    nlohmann::json trees = nlohmann::json::array();
    for (const auto& t : forest->trees()) trees.push_back(detail::tree_to_json(t));
    nlohmann::json inbag = nlohmann::json::array();
    for (const auto& bag : forest->inbag()) inbag.push_back(detail::bits_to_hex(bag));
    j["state"] = {{"n_features", forest->n_features()},
                  {"n_classes", forest->n_classes()},
                  {"max_samples", forest->max_samples()},
                  {"seed", forest->seed()},
                  {"train_n", forest->inbag().front().size()},
                  {"trees", std::move(trees)},
                  {"inbag", std::move(inbag)}};
  } else if (const auto* boost = dynamic_cast<const BoostModel*>(&model)) {
    j["kind"] = "adaboost";
    nlohmann::json stages = nlohmann::json::array();
    for (const auto& s : boost->stages())
      stages.push_back({{"alpha", s.alpha}, {"tree", detail::tree_to_json(s.tree)}});
    j["state"] = {{"n_features", boost->n_features()},
                  {"n_classes", boost->n_classes()},
                  {"learning_rate", boost->learning_rate()},
                  {"stages", std::move(stages)}};
  } else if (const auto* voting = dynamic_cast<const VotingModel*>(&model)) {
    j["kind"] = "voting";
    nlohmann::json members = nlohmann::json::array();
    for (const auto& m : voting->members()) members.push_back(model_to_json(*m));
    j["state"] = {{"weights", voting->weights()}, {"members", std::move(members)}};
  } else {
    throw data_error("model kind is not serializable");
  }
  return j;
}

inline std::shared_ptr<const Classifier> model_from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  const auto& state = j.at("state");
  if (kind == "tree")
    return std::make_shared<TreeModel>(detail::tree_from_json(state));
  if (kind == "forest") {
    std::vector<TreeModel> trees;
    for (const auto& tj : state.at("trees")) trees.push_back(detail::tree_from_json(tj));
    auto n = state.at("train_n").get<std::size_t>();
    std::vector<std::vector<bool>> inbag;
    for (const auto& hj : state.at("inbag"))
      inbag.push_back(detail::hex_to_bits(hj.get<std::string>(), n));
    return std::make_shared<ForestModel>(
        state.at("n_features").get<std::size_t>(),
        state.at("n_classes").get<std::size_t>(),
        state.at("max_samples").get<double>(), state.at("seed").get<std::uint64_t>(),
        std::move(trees), std::move(inbag));
  }
  if (kind == "adaboost") {
    std::vector<BoostStage> stages;
    for (const auto& sj : state.at("stages"))
      stages.push_back(
          {detail::tree_from_json(sj.at("tree")), sj.at("alpha").get<double>()});
    return std::make_shared<BoostModel>(state.at("n_features").get<std::size_t>(),
                                        state.at("n_classes").get<std::size_t>(),
                                        state.at("learning_rate").get<double>(),
                                        std::move(stages));
  }
  if (kind == "voting") {
    std::vector<std::shared_ptr<const Classifier>> members;
    for (const auto& mj : state.at("members")) members.push_back(model_from_json(mj));
    return std::make_shared<VotingModel>(std::move(members),
                                         state.at("weights").get<std::vector<double>>());
  }
  throw data_error("unknown model kind in file: " + kind);
}

struct ModelProvenance {
  std::optional<VariantSpec> variant;
  std::uint64_t seed = 0;
  std::string dataset_fingerprint;
};

// Self-describing JSON model file with an embedded content checksum.
inline void save_model(const Classifier& model, const std::filesystem::path& path,
                       const ModelProvenance& prov = {}) {
  nlohmann::json payload = model_to_json(model);
  payload["provenance"] = {
      {"variant", prov.variant ? to_json(*prov.variant) : nlohmann::json(nullptr)},
      {"seed", prov.seed},
      {"dataset_fingerprint", prov.dataset_fingerprint}};
  std::string body = payload.dump();
  nlohmann::json file;
  file["format_version"] = kModelFormatVersion;
  file["checksum"] = to_hex(fnv1a64(body.data(), body.size()));
  file["payload"] = std::move(payload);
  write_atomic(path, file.dump(2) + "\n");
}

struct LoadedModel {
  std::shared_ptr<const Classifier> model;
  nlohmann::json provenance;
};

inline LoadedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw data_error("cannot open model file: " + path.string());
  nlohmann::json file;
  try {
    in >> file;
  } catch (const nlohmann::json::exception& e) {
    throw data_error("truncated or invalid model file: " + std::string(e.what()));
  }
  if (!file.contains("format_version") || !file["format_version"].is_number_integer())
    throw data_error("model file is missing its format version");
  if (file["format_version"].get<int>() != kModelFormatVersion)
    throw data_error("model format version mismatch: file has " +
                     file["format_version"].dump() + ", reader expects " +
                     std::to_string(kModelFormatVersion));
  std::string body = file.at("payload").dump();
  if (to_hex(fnv1a64(body.data(), body.size())) !=
      file.at("checksum").get<std::string>())
    throw data_error("model file checksum mismatch");

  LoadedModel out;
  out.model = model_from_json(file.at("payload"));
  out.provenance = file.at("payload").value("provenance", nlohmann::json::object());
  return out;
}

}  // namespace rbml
