// Command-line front end: dataset inspection and splitting, synthetic data,
// rebalancing variants, model training, grid search, evaluation, PCA
// diagnostics and CNN architecture planning.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rbml/dataset_io.hpp"
#include "rbml/model_io.hpp"
#include "rbml/net_plan.hpp"
#include "rbml/pca.hpp"
#include "rbml/presets.hpp"
#include "rbml/report.hpp"
#include "rbml/run_config.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::optional<std::vector<std::string>> maybe_label_map(const std::string& path) {
  if (path.empty()) return std::nullopt;
  return rbml::load_label_map(path);
}

void print_distribution(const rbml::FeatureDataset& ds) {
  auto counts = ds.class_counts();
  std::size_t tagged_synthetic = 0;
  for (std::size_t i = 0; i < ds.size(); ++i)
    if (ds.tag(i) == rbml::kSyntheticTag) ++tagged_synthetic;
  std::printf("rows: %zu  features: %zu  classes: %zu\n", ds.size(), ds.dim(),
              ds.n_classes());
  for (std::size_t c = 0; c < counts.size(); ++c)
    std::printf("  %-16s %zu\n", ds.class_names()[c].c_str(), counts[c]);
  if (tagged_synthetic > 0) std::printf("synthetic rows: %zu\n", tagged_synthetic);
}

rbml::ReportMeta meta_for(const rbml::RunConfig& cfg, const rbml::RunInputs& in,
                          const std::string& family) {
  rbml::ReportMeta meta;
  meta.family = family;
  meta.seed = cfg.seed;
  meta.primary_eval = cfg.primary_eval.empty() && !in.pools.empty()
                          ? in.pools.front().name
                          : cfg.primary_eval;
  meta.classes = in.original.class_names();
  meta.top_k = cfg.top_k;
  return meta;
}

int run_inspect(const std::string& data_path, const std::string& labels) {
  auto ds = rbml::load_features(data_path, maybe_label_map(labels));
  std::printf("%s\n", data_path.c_str());
  print_distribution(ds);
  std::printf("fingerprint: %s\n", ds.fingerprint().c_str());
  return 0;
}

int run_split(const std::string& data_path, const std::string& out_dir,
              double fraction, std::uint64_t seed, bool uniform,
              const std::string& labels, const std::string& format) {
  auto ds = rbml::load_features(data_path, maybe_label_map(labels));
  auto split = uniform ? rbml::uniform_split(ds, fraction, seed)
                       : rbml::stratified_split(ds, fraction, seed);
  for (const auto& w : split.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  fs::create_directories(out_dir);
  std::string ext = format == "csv" ? ".csv" : ".rbml";
  rbml::save_features(split.train, fs::path(out_dir) / ("train" + ext));
  rbml::save_features(split.val, fs::path(out_dir) / ("val" + ext));
  std::printf("train: %zu rows, val: %zu rows -> %s\n", split.train.size(),
              split.val.size(), out_dir.c_str());
  return 0;
}

int run_synth(const std::string& config_path, const std::string& profile,
              std::size_t dim, double spread, const std::string& source,
              std::uint64_t seed, const std::string& out_path) {
  rbml::FeatureDataset ds;
  if (!profile.empty()) {
    if (profile != "vehicle16") throw rbml::data_error("unknown profile: " + profile);
    const auto& c = rbml::presets::vehicle16_train_counts();
    auto counts = rbml::presets::vehicle16_combined_counts();
    if (source == "primary") counts = c.primary;
    else if (source == "curated") counts = c.curated;
    else if (source == "crawled") counts = c.crawled;
    else if (source != "combined")
      throw rbml::data_error("unknown source: " + source);
    ds = rbml::presets::vehicle16_blobs(counts, dim, seed, spread);
  } else {
    if (config_path.empty())
      throw rbml::data_error("synth needs --config or --profile");
    std::ifstream in(config_path);
    if (!in) throw rbml::data_error("cannot open config: " + config_path);
    json j;
    in >> j;
    std::vector<rbml::BlobSpec> spec;
    for (const auto& cj : j.at("classes")) {
      rbml::BlobSpec b;
      b.center = cj.at("center").get<std::vector<double>>();
      b.stddev = cj.value("stddev", 1.0);
      b.count = cj.at("count").get<std::size_t>();
      b.name = cj.value("name", std::string{});
      spec.push_back(std::move(b));
    }
    ds = rbml::synth_blobs(spec, j.value("seed", seed));
  }
  rbml::save_features(ds, out_path);
  std::printf("wrote %zu rows to %s\n", ds.size(), out_path.c_str());
  return 0;
}

int run_rebalance(const std::string& original_path,
                  const std::vector<std::string>& extras_paths,
                  const std::string& kind, std::size_t smote_k, double theta,
                  std::size_t target, std::uint64_t seed, const std::string& labels,
                  const std::string& out_path, const std::string& manifest_path) {
  auto label_map = maybe_label_map(labels);
  auto original = rbml::load_features(original_path, label_map);
  std::optional<rbml::FeatureDataset> extras;
  for (std::size_t i = 0; i < extras_paths.size(); ++i) {
    auto ds = rbml::load_features(
        extras_paths[i], label_map ? label_map
                                   : std::optional<std::vector<std::string>>{
                                         original.class_names()});
    rbml::FeatureDataset tagged(ds.dim(), ds.class_names());
    for (std::size_t r = 0; r < ds.size(); ++r)
      tagged.push_row(ds.row(r), ds.label(r), static_cast<std::uint8_t>(i + 1));
    extras = extras ? rbml::concat(*extras, tagged) : std::move(tagged);
  }

  rbml::VariantSpec spec;
  spec.kind = rbml::variant_kind_from_string(kind);
  spec.smote_k = smote_k;
  spec.partial_theta = theta;
  spec.balanced_target = target;
  spec.seed = seed;

  auto before = extras ? rbml::concat(original, *extras) : original;
  auto variant = rbml::build_variant(original, extras ? &*extras : nullptr, spec);
  rbml::save_features(variant, out_path);

  std::string manifest = manifest_path.empty() ? out_path + ".manifest.json"
                                               : manifest_path;
  rbml::write_atomic(manifest,
                     rbml::variant_manifest(spec, before, variant).dump(2) + "\n");
  std::printf("variant '%s': %zu rows -> %s (manifest %s)\n", kind.c_str(),
              variant.size(), out_path.c_str(), manifest.c_str());
  return 0;
}

int run_train(const std::string& config_path, std::optional<std::uint64_t> seed_flag,
              const std::string& out_dir) {
  auto cfg = rbml::load_run_config(config_path);
  if (seed_flag) cfg.seed = *seed_flag;
  if (cfg.model.is_null()) throw rbml::data_error("config has no model section");
  auto in = rbml::load_run_inputs(cfg);

  auto before = in.extras ? rbml::concat(in.original, *in.extras) : in.original;
  auto train_ds =
      rbml::build_variant(in.original, in.extras ? &*in.extras : nullptr, cfg.variant);
  auto model = rbml::train_from_config(cfg.model, train_ds, cfg.seed);

  fs::create_directories(out_dir);
  rbml::ModelProvenance prov;
  prov.variant = cfg.variant;
  prov.seed = cfg.seed;
  prov.dataset_fingerprint = train_ds.fingerprint();
  rbml::save_model(*model, fs::path(out_dir) / "model.json", prov);
  rbml::write_atomic(fs::path(out_dir) / "variant_manifest.json",
                     rbml::variant_manifest(cfg.variant, before, train_ds).dump(2) + "\n");

  json summary;
  summary["model"] = cfg.model;
  summary["variant"] = rbml::to_json(cfg.variant);
  summary["seed"] = cfg.seed;
  summary["train_rows"] = train_ds.size();
  for (const auto& pool : in.pools) {
    auto val = rbml::evaluate(*model, pool.val, pool.name + "/val");
    auto test = rbml::evaluate(*model, pool.test, pool.name + "/test");
    summary["pools"][pool.name] = {{"val", rbml::to_json(val)},
                                   {"test", rbml::to_json(test)}};
    std::printf("%-12s val %.4f  test %.4f\n", pool.name.c_str(),
                val.overall_accuracy, test.overall_accuracy);
  }
  rbml::write_atomic(fs::path(out_dir) / "summary.json", summary.dump(2) + "\n");
  std::printf("model written to %s\n", (fs::path(out_dir) / "model.json").c_str());
  return 0;
}

int run_gridsearch(const std::string& config_path, std::optional<std::uint64_t> seed_flag,
                   const std::string& out_dir, std::size_t jobs,
                   const std::string& format) {
  auto cfg = rbml::load_run_config(config_path);
  if (seed_flag) cfg.seed = *seed_flag;
  if (!cfg.grid) throw rbml::data_error("config has no grid section");
  auto in = rbml::load_run_inputs(cfg);

  rbml::GridRunConfig run;
  run.grid = *cfg.grid;
  run.seed = cfg.seed;
  run.primary_eval = cfg.primary_eval;
  run.variant_defaults = cfg.variant;
  run.jobs = jobs;
  run.top_k = cfg.top_k;

  auto results = rbml::run_gridsearch(in.original, in.extras ? &*in.extras : nullptr,
                                      in.pools, run);
  auto meta = meta_for(cfg, in, cfg.grid->family);
  auto report = rbml::report_to_json(results, meta);

  fs::create_directories(out_dir);
  rbml::emit_report(report, rbml::ReportFormat::json, fs::path(out_dir) / "report.json");
  rbml::emit_report(report, rbml::ReportFormat::markdown, fs::path(out_dir) / "report.md");
  rbml::emit_report(report, rbml::ReportFormat::csv, fs::path(out_dir) / "report.csv");
  rbml::emit_report(rbml::report_head(report, meta.top_k), rbml::ReportFormat::markdown,
                    fs::path(out_dir) / "report_top.md");
  rbml::emit_sidecars(results, meta, fs::path(out_dir) / "report");

  std::size_t failed = 0;
  for (const auto& r : results)
    if (!r.ok) ++failed;
  std::printf("%zu cells (%zu failed); top %zu by %s val accuracy:\n", results.size(),
              failed, std::min(meta.top_k, results.size()), meta.primary_eval.c_str());
  for (std::size_t r = 0; r < std::min(meta.top_k, results.size()); ++r) {
    if (!results[r].ok) continue;
    std::printf("  %zu. %s  val %.4f\n", r + 1, rbml::cell_label(results[r].cell).c_str(),
                rbml::primary_val_accuracy(results[r], meta.primary_eval));
  }
  std::string fmt_path = format == "markdown" ? "report.md"
                         : format == "csv"    ? "report.csv"
                                              : "report.json";
  std::printf("reports in %s (primary: %s)\n", out_dir.c_str(), fmt_path.c_str());
  return 0;
}

int run_eval(const std::string& model_path, const std::string& data_path,
             const std::string& labels, const std::string& name,
             const std::string& format, const std::string& out_path) {
  auto loaded = rbml::load_model(model_path);
  auto ds = rbml::load_features(data_path, maybe_label_map(labels));
  auto rep = rbml::evaluate(*loaded.model, ds, name);

  std::string content = format == "markdown"
                            ? rbml::eval_report_markdown(rep, ds.class_names())
                            : rbml::to_json(rep).dump(2) + "\n";
  if (out_path.empty())
    std::fputs(content.c_str(), stdout);
  else
    rbml::write_atomic(out_path, content);
  std::printf("overall accuracy: %.4f\n", rep.overall_accuracy);
  return 0;
}

int run_pca(const std::string& data_path, const std::string& fit_on,
            const std::string& labels, const std::string& out_dir,
            const std::string& stem) {
  auto label_map = maybe_label_map(labels);
  auto ds = rbml::load_features(data_path, label_map);
  auto basis = fit_on.empty() ? ds : rbml::load_features(fit_on, label_map);
  auto model = rbml::pca2_fit(basis);
  auto pts = rbml::pca2_project(model, ds);

  fs::create_directories(out_dir);
  rbml::write_scatter_csv(fs::path(out_dir) / (stem + ".csv"), pts, ds);
  rbml::write_scatter_svg(fs::path(out_dir) / (stem + ".svg"), pts, ds, stem);
  json j;
  j["mean"] = model.mean;
  j["components"] = {model.components[0], model.components[1]};
  j["explained_variance"] = model.explained_variance;
  rbml::write_atomic(fs::path(out_dir) / (stem + ".json"), j.dump(2) + "\n");
  std::printf("explained variance: %.6g, %.6g -> %s/%s.{csv,svg,json}\n",
              model.explained_variance[0], model.explained_variance[1],
              out_dir.c_str(), stem.c_str());
  return 0;
}

int run_plan_cnn(const std::string& preset, std::size_t nf, const std::string& blocks,
                 const std::string& block_kind, bool batchnorm, std::size_t classes,
                 const std::string& input, const std::string& format,
                 const std::string& out_path) {
  rbml::NetConfig cfg;
  if (!preset.empty()) {
    cfg = rbml::net_preset(preset);
  } else {
    cfg.nf = nf;
    cfg.block_kind = block_kind == "bottleneck" ? rbml::BlockKind::bottleneck
                                                : rbml::BlockKind::plain;
    cfg.batchnorm = batchnorm;
    if (std::sscanf(blocks.c_str(), "%zu,%zu,%zu", &cfg.nresb[0], &cfg.nresb[1],
                    &cfg.nresb[2]) != 3)
      throw rbml::data_error("--blocks expects three comma-separated counts");
  }
  if (classes > 0) cfg.n_classes = classes;
  if (!input.empty() &&
      std::sscanf(input.c_str(), "%zu,%zu,%zu", &cfg.input[0], &cfg.input[1],
                  &cfg.input[2]) != 3)
    throw rbml::data_error("--input expects h,w,c");

  auto plan = rbml::plan_network(cfg);

  std::string content;
  if (format == "json") {
    json j;
    j["config"] = {{"nf", cfg.nf},
                   {"block_kind", rbml::to_string(cfg.block_kind)},
                   {"nresb", cfg.nresb},
                   {"batchnorm", cfg.batchnorm},
                   {"n_classes", cfg.n_classes},
                   {"input", cfg.input}};
    json layers = json::array();
    for (const auto& l : plan.layers)
      layers.push_back({{"name", l.name}, {"out_shape", l.out_shape}, {"params", l.params}});
    j["layers"] = std::move(layers);
    j["total_params"] = plan.total_params;
    j["notes"] = plan.notes;
    content = j.dump(2) + "\n";
  } else if (format == "csv") {
    content = "layer,out_h,out_w,out_c,params\n";
    for (const auto& l : plan.layers)
      content += l.name + "," + std::to_string(l.out_shape[0]) + "," +
                 std::to_string(l.out_shape[1]) + "," + std::to_string(l.out_shape[2]) +
                 "," + std::to_string(l.params) + "\n";
    content += "total,,,," + std::to_string(plan.total_params) + "\n";
  } else {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%-24s %-16s %12s\n", "layer", "output", "params");
    content = buf;
    for (const auto& l : plan.layers) {
      std::string shape = std::to_string(l.out_shape[0]) + "x" +
                          std::to_string(l.out_shape[1]) + "x" +
                          std::to_string(l.out_shape[2]);
      std::snprintf(buf, sizeof(buf), "%-24s %-16s %12zu\n", l.name.c_str(),
                    shape.c_str(), l.params);
      content += buf;
    }
    std::snprintf(buf, sizeof(buf), "%-24s %-16s %12zu\n", "total", "", plan.total_params);
    content += buf;
    for (const auto& n : plan.notes) content += "note: " + n + "\n";
  }
  if (out_path.empty())
    std::fputs(content.c_str(), stdout);
  else
    rbml::write_atomic(out_path, content);
  return 0;
}

int run_report(const std::string& results_path, const std::string& format,
               const std::string& out_path) {
  std::ifstream in(results_path);
  if (!in) throw rbml::data_error("cannot open results: " + results_path);
  json report;
  try {
    in >> report;
  } catch (const json::exception& e) {
    throw rbml::data_error("invalid results JSON: " + std::string(e.what()));
  }
  auto fmt = rbml::report_format_from_string(format);
  if (out_path.empty()) {
    std::fputs((fmt == rbml::ReportFormat::csv ? rbml::render_csv(report)
                                               : rbml::render_markdown(report))
                   .c_str(),
               stdout);
  } else {
    rbml::emit_report(report, fmt, out_path);
    std::printf("wrote %s\n", out_path.c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"imbalanced-classification workbench: rebalancing variants, "
               "tree ensembles, evaluation and CNN planning"};
  app.require_subcommand(1);

  // inspect
  std::string in_data, in_labels;
  auto* inspect = app.add_subcommand("inspect", "summarize a dataset file");
  inspect->add_option("data", in_data)->required();
  inspect->add_option("--labels", in_labels, "label map sidecar");

  // split
  std::string sp_data, sp_out = "split_out", sp_labels, sp_format = "binary";
  double sp_fraction = 0.8;
  std::uint64_t sp_seed = 0;
  bool sp_uniform = false;
  auto* split = app.add_subcommand("split", "stratified train/val split");
  split->add_option("data", sp_data)->required();
  split->add_option("--out", sp_out, "output directory");
  split->add_option("--fraction", sp_fraction, "train fraction (default 0.8)");
  split->add_option("--seed", sp_seed);
  split->add_flag("--uniform", sp_uniform, "plain uniform split instead of stratified");
  split->add_option("--labels", sp_labels);
  split->add_option("--format", sp_format)->check(CLI::IsMember({"binary", "csv"}));

  // synth
  std::string sy_config, sy_profile, sy_source = "combined", sy_out;
  std::size_t sy_dim = 8;
  double sy_spread = 1.0;
  std::uint64_t sy_seed = 0;
  auto* synth = app.add_subcommand("synth", "generate Gaussian-blob datasets");
  synth->add_option("--config", sy_config, "blob spec JSON");
  synth->add_option("--profile", sy_profile, "built-in corpus profile (vehicle16)");
  synth->add_option("--source", sy_source, "profile source: combined|primary|curated|crawled");
  synth->add_option("--dim", sy_dim, "feature dimension for profiles");
  synth->add_option("--spread", sy_spread, "cluster stddev for profiles");
  synth->add_option("--seed", sy_seed);
  synth->add_option("--out", sy_out)->required();

  // rebalance
  std::string rb_original, rb_kind, rb_labels, rb_out, rb_manifest;
  std::vector<std::string> rb_extras;
  std::size_t rb_smote_k = 5, rb_target = 2000;
  double rb_theta = 0.25;
  std::uint64_t rb_seed = 0;
  auto* rebalance = app.add_subcommand("rebalance", "build a training-set variant");
  rebalance->add_option("original", rb_original)->required();
  rebalance->add_option("--extras", rb_extras, "extra source files");
  rebalance->add_option("--kind", rb_kind)->required()->check(CLI::IsMember(
      {"original", "combined", "smote", "smote_combined", "smote_partial", "balanced"}));
  rebalance->add_option("--smote-k", rb_smote_k, "SMOTE neighbor count");
  rebalance->add_option("--theta", rb_theta, "smote_partial threshold fraction");
  rebalance->add_option("--target", rb_target, "balanced per-class count");
  rebalance->add_option("--seed", rb_seed);
  rebalance->add_option("--labels", rb_labels);
  rebalance->add_option("--out", rb_out)->required();
  rebalance->add_option("--manifest", rb_manifest, "manifest path (default <out>.manifest.json)");

  // train
  std::string tr_config, tr_out = "train_out";
  std::uint64_t tr_seed = 0;
  bool tr_seed_set = false;
  auto* train = app.add_subcommand("train", "train one model from a config");
  train->add_option("--config", tr_config)->required();
  train->add_option("--seed", tr_seed)->each([&](const std::string&) { tr_seed_set = true; });
  train->add_option("--out", tr_out);

  // gridsearch
  std::string gs_config, gs_out = "grid_out", gs_format = "json";
  std::uint64_t gs_seed = 0;
  bool gs_seed_set = false;
  std::size_t gs_jobs = 1;
  auto* grid = app.add_subcommand("gridsearch", "train and rank a hyperparameter grid");
  grid->add_option("--config", gs_config)->required();
  grid->add_option("--seed", gs_seed)->each([&](const std::string&) { gs_seed_set = true; });
  grid->add_option("--out", gs_out);
  grid->add_option("--jobs", gs_jobs, "concurrent grid cells");
  grid->add_option("--format", gs_format)->check(CLI::IsMember({"markdown", "csv", "json"}));

  // eval
  std::string ev_model, ev_data, ev_labels, ev_name = "eval", ev_format = "json", ev_out;
  auto* evalc = app.add_subcommand("eval", "evaluate a saved model on a dataset");
  evalc->add_option("--model", ev_model)->required();
  evalc->add_option("--data", ev_data)->required();
  evalc->add_option("--labels", ev_labels);
  evalc->add_option("--name", ev_name);
  evalc->add_option("--format", ev_format)->check(CLI::IsMember({"markdown", "json"}));
  evalc->add_option("--out", ev_out);

  // pca
  std::string pc_data, pc_fit_on, pc_labels, pc_out = "pca_out", pc_stem = "scatter";
  auto* pca = app.add_subcommand("pca", "two-component projection scatter");
  pca->add_option("data", pc_data)->required();
  pca->add_option("--fit-on", pc_fit_on, "fit the basis on another dataset");
  pca->add_option("--labels", pc_labels);
  pca->add_option("--out", pc_out);
  pca->add_option("--name", pc_stem, "output file stem");

  // plan-cnn
  std::string pl_preset, pl_blocks = "0,0,0", pl_kind = "plain", pl_input, pl_format = "text", pl_out;
  std::size_t pl_nf = 8, pl_classes = 0;
  bool pl_batchnorm = false;
  auto* plan = app.add_subcommand("plan-cnn", "shape and parameter plan of a CNN config");
  plan->add_option("--preset", pl_preset,
                   "resnet18-like|resnet34-like|resnet50-like|resnet101-like|best-model");
  plan->add_option("--nf", pl_nf, "base filter count");
  plan->add_option("--blocks", pl_blocks, "residual blocks per stage, e.g. 2,2,2");
  plan->add_option("--block-kind", pl_kind)->check(CLI::IsMember({"plain", "bottleneck"}));
  plan->add_flag("--batchnorm", pl_batchnorm);
  plan->add_option("--classes", pl_classes, "output classes");
  plan->add_option("--input", pl_input, "input h,w,c (default 224,224,3)");
  plan->add_option("--format", pl_format)->check(CLI::IsMember({"text", "csv", "json"}));
  plan->add_option("--out", pl_out);

  // report
  std::string rp_results, rp_format = "markdown", rp_out;
  auto* report = app.add_subcommand("report", "re-render a JSON report");
  report->add_option("--results", rp_results)->required();
  report->add_option("--format", rp_format)->check(CLI::IsMember({"markdown", "csv"}));
  report->add_option("--out", rp_out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*inspect) return run_inspect(in_data, in_labels);
    if (*split)
      return run_split(sp_data, sp_out, sp_fraction, sp_seed, sp_uniform, sp_labels,
                       sp_format);
    if (*synth)
      return run_synth(sy_config, sy_profile, sy_dim, sy_spread, sy_source, sy_seed, sy_out);
    if (*rebalance)
      return run_rebalance(rb_original, rb_extras, rb_kind, rb_smote_k, rb_theta,
                           rb_target, rb_seed, rb_labels, rb_out, rb_manifest);
    if (*train)
      return run_train(tr_config, tr_seed_set ? std::optional<std::uint64_t>{tr_seed}
                                              : std::nullopt, tr_out);
    if (*grid)
      return run_gridsearch(gs_config, gs_seed_set ? std::optional<std::uint64_t>{gs_seed}
                                                   : std::nullopt,
                            gs_out, gs_jobs, gs_format);
    if (*evalc) return run_eval(ev_model, ev_data, ev_labels, ev_name, ev_format, ev_out);
    if (*pca) return run_pca(pc_data, pc_fit_on, pc_labels, pc_out, pc_stem);
    if (*plan)
      return run_plan_cnn(pl_preset, pl_nf, pl_blocks, pl_kind, pl_batchnorm, pl_classes,
                          pl_input, pl_format, pl_out);
    if (*report) return run_report(rp_results, rp_format, rp_out);
  } catch (const rbml::train_error& e) {
    std::fprintf(stderr, "training error: %s\n", e.what());
    return 3;
  } catch (const rbml::data_error& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 1;
}
