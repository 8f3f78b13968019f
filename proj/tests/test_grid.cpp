#include <catch2/catch_amalgamated.hpp>

#include "rbml/presets.hpp"
#include "rbml/report.hpp"
#include "rbml/run_config.hpp"

using namespace rbml;

namespace {

struct Bench {
  FeatureDataset original;
  FeatureDataset extras;
  std::vector<EvalPool> pools;
};

Bench make_bench(std::uint64_t seed) {
  std::vector<BlobSpec> orig = {{{0.0, 0.0, 0.0, 0.0}, 1.2, 120, "a"},
                                {{3.0, 0.0, 0.0, 0.0}, 1.2, 60, "b"},
                                {{0.0, 3.0, 0.0, 0.0}, 1.2, 24, "c"}};
  std::vector<BlobSpec> extra = {{{0.3, 0.0, 0.0, 0.0}, 1.2, 30, "a"},
                                 {{3.0, 0.4, 0.0, 0.0}, 1.2, 25, "b"},
                                 {{0.0, 3.3, 0.0, 0.0}, 1.2, 30, "c"}};
  std::vector<BlobSpec> eval_spec = {{{0.0, 0.0, 0.0, 0.0}, 1.2, 40, "a"},
                                     {{3.0, 0.0, 0.0, 0.0}, 1.2, 30, "b"},
                                     {{0.0, 3.0, 0.0, 0.0}, 1.2, 25, "c"}};
  Bench b{synth_blobs(orig, seed), synth_blobs(extra, seed + 50), {}};
  b.pools.push_back(
      {"main", synth_blobs(eval_spec, seed + 100), synth_blobs(eval_spec, seed + 200)});
  return b;
}

}  // namespace

TEST_CASE("grid expansion is the exact cartesian product") {
  auto g1 = presets::ada_stage1();
  auto cells = expand_grid(g1);
  CHECK(cells.size() == 2 * 9 * 8 * 1);
  // 9x8 estimator/rate combinations per training dataset
  std::size_t original_cells = 0;
  for (const auto& c : cells)
    if (c.variant == VariantKind::original) ++original_cells;
  CHECK(original_cells == 72);

  CHECK(expand_grid(presets::ada_stage2()).size() == 2 * 3 * 3 * 9);
  CHECK(expand_grid(presets::ada_stage3()).size() == 6 * 1 * 3 * 9);
  CHECK(expand_grid(presets::rf_estimators()).size() == 7);
  CHECK(expand_grid(presets::rf_max_samples()).size() == 6);
}

TEST_CASE("single-cell grid trains exactly that configuration") {
  auto bench = make_bench(7);
  GridRunConfig cfg;
  cfg.grid.family = "forest";
  cfg.grid.variants = {VariantKind::original};
  cfg.grid.n_estimators = {5};
  cfg.grid.max_samples = {0.75};
  cfg.grid.max_depths = {4};
  cfg.seed = 1;
  cfg.primary_eval = "main";
  auto results = run_gridsearch(bench.original, &bench.extras, bench.pools, cfg);
  REQUIRE(results.size() == 1);
  CHECK(results[0].ok);
  CHECK(results[0].cell.params.n_estimators == 5);
  CHECK(results[0].pools.front().first == "main");
}

TEST_CASE("ranking equals independently retraining every cell") {
  auto bench = make_bench(11);
  GridRunConfig cfg;
  cfg.grid.family = "adaboost";
  cfg.grid.variants = {VariantKind::original, VariantKind::smote};
  cfg.grid.n_estimators = {10, 25};
  cfg.grid.learning_rates = {0.5};
  cfg.grid.max_depths = {3};
  cfg.seed = 21;
  cfg.primary_eval = "main";
  auto results = run_gridsearch(bench.original, &bench.extras, bench.pools, cfg);
  REQUIRE(results.size() == 4);

  // retrain each cell independently and sort by the same key
  std::vector<std::pair<double, std::size_t>> expected;
  for (const auto& cell : expand_grid(cfg.grid)) {
    VariantSpec vs = cfg.variant_defaults;
    vs.kind = cell.variant;
    vs.seed = cfg.seed + static_cast<std::size_t>(cell.variant);
    auto train = build_variant(bench.original, &bench.extras, vs);
    auto model = train_model(train, cell.params, mix_seed(cfg.seed, cell.index));
    auto rep = evaluate(*model, bench.pools[0].val, "v");
    expected.emplace_back(rep.overall_accuracy, cell.index);
  }
  std::stable_sort(expected.begin(), expected.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  for (std::size_t r = 0; r < results.size(); ++r) {
    CHECK(results[r].cell.index == expected[r].second);
    CHECK(primary_val_accuracy(results[r], "main") == expected[r].first);
  }
}

TEST_CASE("parallel grid execution equals serial execution") {
  auto bench = make_bench(13);
  GridRunConfig cfg;
  cfg.grid.family = "forest";
  cfg.grid.variants = {VariantKind::original, VariantKind::combined};
  cfg.grid.n_estimators = {5, 10};
  cfg.grid.max_samples = {0.75};
  cfg.grid.max_depths = {3};
  cfg.seed = 5;
  cfg.primary_eval = "main";
  cfg.jobs = 1;
  auto serial = run_gridsearch(bench.original, &bench.extras, bench.pools, cfg);
  cfg.jobs = 4;
  auto parallel = run_gridsearch(bench.original, &bench.extras, bench.pools, cfg);
  REQUIRE(serial.size() == parallel.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    CHECK(serial[i].cell.index == parallel[i].cell.index);
    for (std::size_t p = 0; p < serial[i].pools.size(); ++p) {
      CHECK(serial[i].pools[p].second.val.overall_accuracy ==
            parallel[i].pools[p].second.val.overall_accuracy);
      CHECK(serial[i].pools[p].second.test.overall_accuracy ==
            parallel[i].pools[p].second.test.overall_accuracy);
    }
  }
}

TEST_CASE("cell failures are recorded without dropping other cells") {
  auto bench = make_bench(17);
  GridRunConfig cfg;
  cfg.grid.family = "adaboost";
  cfg.grid.variants = {VariantKind::original};
  cfg.grid.n_estimators = {5};
  cfg.grid.learning_rates = {0.5, -1.0};  // second cell violates lr > 0
  cfg.grid.max_depths = {2};
  cfg.seed = 1;
  cfg.primary_eval = "main";
  auto results = run_gridsearch(bench.original, &bench.extras, bench.pools, cfg);
  REQUIRE(results.size() == 2);
  CHECK(results[0].ok);
  CHECK_FALSE(results[1].ok);
  CHECK_FALSE(results[1].error.empty());
}

TEST_CASE("reports render consistently across formats") {
  auto bench = make_bench(23);
  GridRunConfig cfg;
  cfg.grid.family = "forest";
  cfg.grid.variants = {VariantKind::original, VariantKind::smote,
                       VariantKind::combined, VariantKind::smote_combined,
                       VariantKind::smote_partial, VariantKind::balanced};
  cfg.grid.n_estimators = {10};
  cfg.grid.max_samples = {0.75};
  cfg.grid.max_depths = {5};
  cfg.seed = 3;
  cfg.primary_eval = "main";
  cfg.variant_defaults.balanced_target = 80;
  auto results = run_gridsearch(bench.original, &bench.extras, bench.pools, cfg);
  REQUIRE(results.size() == 6);
  for (const auto& r : results) CHECK(r.ok);

  ReportMeta meta;
  meta.family = "forest";
  meta.seed = 3;
  meta.primary_eval = "main";
  meta.classes = bench.original.class_names();
  auto report = report_to_json(results, meta);

  // six rows named exactly by the six variant kinds
  std::set<std::string> names;
  for (const auto& row : report.at("rows")) names.insert(row.at("variant"));
  CHECK(names == std::set<std::string>{"original", "combined", "smote",
                                       "smote_combined", "smote_partial", "balanced"});

  // markdown shows the same numbers json carries, at printed precision
  auto md = render_markdown(report);
  auto csv = render_csv(report);
  for (const auto& row : report.at("rows")) {
    double val = row.at("pools").at("main").at("val_acc").get<double>();
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%.4f", val);
    CHECK(md.find(buf) != std::string::npos);
    CHECK(csv.find(buf) != std::string::npos);
  }

  // sidecars and emission
  namespace fs = std::filesystem;
  auto dir = fs::temp_directory_path() / "rbml_tests" / "report";
  emit_report(report, ReportFormat::json, dir / "report.json");
  emit_report(report, ReportFormat::markdown, dir / "report.md");
  emit_report(report, ReportFormat::csv, dir / "report.csv");
  emit_sidecars(results, meta, dir / "report");
  CHECK(fs::exists(dir / "report_per_class.csv"));
  CHECK(fs::exists(dir / "report_roc.csv"));

  std::ifstream back(dir / "report.json");
  nlohmann::json parsed;
  back >> parsed;
  CHECK(parsed == report);
}

TEST_CASE("end-to-end determinism: identical config gives byte-identical reports") {
  auto bench = make_bench(29);
  GridRunConfig cfg;
  cfg.grid.family = "adaboost";
  cfg.grid.variants = {VariantKind::original, VariantKind::smote};
  cfg.grid.n_estimators = {8};
  cfg.grid.learning_rates = {0.2, 0.5};
  cfg.grid.max_depths = {2};
  cfg.seed = 99;
  cfg.primary_eval = "main";

  ReportMeta meta;
  meta.family = "adaboost";
  meta.seed = 99;
  meta.primary_eval = "main";
  meta.classes = bench.original.class_names();

  auto a = report_to_json(
      run_gridsearch(bench.original, &bench.extras, bench.pools, cfg), meta);
  auto b = report_to_json(
      run_gridsearch(bench.original, &bench.extras, bench.pools, cfg), meta);
  CHECK(a.dump() == b.dump());
}

TEST_CASE("run config parsing resolves paths, grids and presets") {
  nlohmann::json j = {
      {"seed", 7},
      {"data", {{"original", "orig.rbml"}, {"extras", {"e1.rbml", "e2.rbml"}}}},
      {"variant", {{"kind", "smote_combined"}, {"smote_k", 3}}},
      {"grid", {{"preset", "ada-stage3"}}},
      {"eval_pools", {{{"name", "main"}, {"val", "v.rbml"}, {"test", "t.rbml"}}}},
      {"primary_eval", "main"}};
  auto cfg = parse_run_config(j, "/base");
  CHECK(cfg.seed == 7);
  CHECK(cfg.original == std::filesystem::path("/base/orig.rbml"));
  REQUIRE(cfg.extras.size() == 2);
  CHECK(cfg.extras[1] == std::filesystem::path("/base/e2.rbml"));
  CHECK(cfg.variant.kind == VariantKind::smote_combined);
  CHECK(cfg.variant.smote_k == 3);
  CHECK(cfg.variant.seed == 7);  // inherits the run seed
  REQUIRE(cfg.grid.has_value());
  CHECK(cfg.grid->variants.size() == 6);
  REQUIRE(cfg.eval_pools.size() == 1);
  CHECK(cfg.eval_pools[0].test == std::filesystem::path("/base/t.rbml"));

  nlohmann::json model = {{"family", "forest"}, {"n_estimators", 50},
                          {"max_samples", 0.6}, {"max_depth", nullptr}};
  auto params = model_params_from_json(model);
  CHECK(params.family == "forest");
  CHECK(params.n_estimators == 50);
  CHECK_FALSE(params.max_depth.has_value());
}

TEST_CASE("bundled corpus profile counts are self-consistent") {
  auto combined = presets::vehicle16_combined_counts();
  std::size_t majority = *std::max_element(combined.begin(), combined.end());
  CHECK(majority == 7909);  // the boat class dominates the pool
  const auto& names = presets::vehicle16_names();
  CHECK(names.size() == 16);
  CHECK(std::string(names[3]) == "Boat");
  CHECK(combined[3] == majority);
}
