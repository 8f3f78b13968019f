#include <catch2/catch_amalgamated.hpp>

#include "rbml/ensemble.hpp"

using namespace rbml;

namespace {

FeatureDataset separable_blobs(std::uint64_t seed, std::size_t per_class = 60) {
  std::vector<BlobSpec> spec = {{{0.0, 0.0}, 0.6, per_class, "a"},
                                {{6.0, 0.0}, 0.6, per_class, "b"},
                                {{0.0, 6.0}, 0.6, per_class, "c"}};
  return synth_blobs(spec, seed);
}

FeatureDataset tiny(const std::vector<double>& xs, const std::vector<std::uint32_t>& ys) {
  FeatureDataset ds(1, {"a", "b"});
  for (std::size_t i = 0; i < xs.size(); ++i) ds.push_row({&xs[i], 1}, ys[i]);
  return ds;
}

}  // namespace

TEST_CASE("single deep tree forest memorizes separable blobs") {
  auto ds = separable_blobs(3);
  auto forest = fit_forest(ds, 1, 1.0, std::nullopt, 0);
  CHECK(weighted_accuracy(forest, ds) == 1.0);
}

TEST_CASE("forest fitting is deterministic per seed") {
  auto ds = separable_blobs(4, 40);
  auto a = fit_forest(ds, 20, 0.75, 6, 11);
  auto b = fit_forest(ds, 20, 0.75, 6, 11);
  REQUIRE(a.trees().size() == b.trees().size());
  for (std::size_t t = 0; t < a.trees().size(); ++t) {
    CHECK(a.inbag()[t] == b.inbag()[t]);
    REQUIRE(a.trees()[t].nodes().size() == b.trees()[t].nodes().size());
    for (std::size_t n = 0; n < a.trees()[t].nodes().size(); ++n) {
      CHECK(a.trees()[t].nodes()[n].feature == b.trees()[t].nodes()[n].feature);
      CHECK(a.trees()[t].nodes()[n].threshold == b.trees()[t].nodes()[n].threshold);
    }
  }
}

TEST_CASE("forest probabilities form a distribution and ignore tree order") {
  auto ds = separable_blobs(5, 30);
  auto forest = fit_forest(ds, 30, 0.8, std::nullopt, 2);
  rng_engine rng(9);
  std::uniform_real_distribution<double> unit(-2.0, 8.0);
  for (int rep = 0; rep < 30; ++rep) {
    std::vector<double> x = {unit(rng), unit(rng)};
    auto p = forest.predict_proba(x);
    double sum = 0.0;
    for (double v : p) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0 + 1e-12);
      sum += v;
    }
    CHECK(sum == Catch::Approx(1.0).margin(1e-9));
  }
}

TEST_CASE("oob fraction matches the with-replacement limit") {
  std::vector<BlobSpec> spec = {{{0.0}, 1.0, 1000, "a"}};
  FeatureDataset ds(1, {"a", "b"});
  auto blob = synth_blobs(spec, 1);
  for (std::size_t i = 0; i < blob.size(); ++i) ds.push_row(blob.row(i), i % 2);
  auto forest = fit_forest(ds, 50, 0.75, 1, 5);
  double frac = mean_oob_fraction(forest);
  CHECK(frac > 0.42);
  CHECK(frac < 0.52);  // e^-0.75 ~ 0.472
}

TEST_CASE("oob bookkeeping: in-bag rows are excluded, uncovered rows reported") {
  FeatureDataset one = tiny({0.0}, {0});
  auto forest = fit_forest(one, 1, 1.0, std::nullopt, 0);
  auto res = oob_accuracy(forest, one);
  CHECK_FALSE(res.accuracy.has_value());
  CHECK(res.skipped == 1);
  CHECK(res.evaluated == 0);

  auto ds = separable_blobs(6, 50);
  auto big = fit_forest(ds, 200, 0.75, std::nullopt, 3);
  auto oob = oob_accuracy(big, ds);
  REQUIRE(oob.accuracy.has_value());
  CHECK(oob.evaluated + oob.skipped == ds.size());
  CHECK(*oob.accuracy >= 0.9);  // easy blobs

  CHECK_THROWS_AS(oob_accuracy(big, separable_blobs(7, 10)), data_error);
}

TEST_CASE("forest prediction ignores tree order up to reassociation") {
  auto ds = separable_blobs(14, 30);
  auto forest = fit_forest(ds, 16, 0.75, 5, 4);
  std::vector<TreeModel> reversed(forest.trees().rbegin(), forest.trees().rend());
  std::vector<std::vector<bool>> bags(forest.inbag().rbegin(), forest.inbag().rend());
  ForestModel permuted(forest.n_features(), forest.n_classes(), forest.max_samples(),
                       forest.seed(), std::move(reversed), std::move(bags));
  rng_engine rng(2);
  std::uniform_real_distribution<double> unit(-2.0, 8.0);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> x = {unit(rng), unit(rng)};
    auto a = forest.predict_proba(x);
    auto b = permuted.predict_proba(x);
    for (std::size_t c = 0; c < a.size(); ++c)
      CHECK(a[c] == Catch::Approx(b[c]).margin(1e-12));
  }
}

TEST_CASE("adaboost reproduces the four-point SAMME hand trace") {
  // the best stump splits at 1.5 and errs on exactly one point (x=2)
  auto ds = tiny({0.0, 1.0, 2.0, 3.0}, {0, 0, 1, 0});
  auto model = fit_adaboost(ds, 1, 1.0, 1, 0);
  REQUIRE(model.stages().size() == 1);
  CHECK(model.stages()[0].alpha == Catch::Approx(std::log(3.0)).epsilon(1e-12));
}

TEST_CASE("adaboost weight update after one round") {
  // replicate the update by hand: err 0.25 -> missed 0.5, correct 1/6 each
  auto ds = tiny({0.0, 1.0, 2.0, 3.0}, {0, 0, 1, 0});
  std::vector<double> w(4, 0.25);
  TreeFitOptions opts;
  opts.max_depth = 1;
  auto stump = fit_tree(ds, w, opts);
  double err = 0.0;
  std::vector<bool> miss(4);
  for (std::size_t i = 0; i < 4; ++i) {
    miss[i] = stump.predict(ds.row(i)) != ds.label(i);
    if (miss[i]) err += w[i];
  }
  REQUIRE(err == 0.25);
  double alpha = std::log((1 - err) / err);
  double sum = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    if (miss[i]) w[i] *= std::exp(alpha);
    sum += w[i];
  }
  for (auto& x : w) x /= sum;
  int missed = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    if (miss[i]) {
      CHECK(w[i] == Catch::Approx(0.5).epsilon(1e-12));
      ++missed;
    } else {
      CHECK(w[i] == Catch::Approx(1.0 / 6.0).epsilon(1e-12));
    }
  }
  CHECK(missed == 1);
}

TEST_CASE("perfect stump stops boosting with a capped alpha") {
  auto ds = tiny({0.0, 1.0, 5.0, 6.0}, {0, 0, 1, 1});
  auto model = fit_adaboost(ds, 50, 1.0, 1, 0);
  REQUIRE(model.stages().size() == 1);
  CHECK(model.stages()[0].alpha == kBoostAlphaCap);
  CHECK(weighted_accuracy(model, ds) == 1.0);
}

TEST_CASE("boost misclassified mass grows after every effective round") {
  auto ds = separable_blobs(8, 25);
  const std::size_t n = ds.size();
  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  const double k = 3.0;
  for (int round = 0; round < 5; ++round) {
    TreeFitOptions opts;
    opts.max_depth = 1;
    auto stump = fit_tree(ds, w, opts);
    double err = 0.0;
    std::vector<bool> miss(n);
    for (std::size_t i = 0; i < n; ++i) {
      miss[i] = stump.predict(ds.row(i)) != ds.label(i);
      if (miss[i]) err += w[i];
    }
    if (err <= 0.0 || err >= 1.0 - 1.0 / k) break;
    double alpha = std::log((1 - err) / err) + std::log(k - 1.0);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (miss[i]) w[i] *= std::exp(alpha);
      sum += w[i];
    }
    double missed_mass = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      w[i] /= sum;
      if (miss[i]) missed_mass += w[i];
    }
    CHECK(missed_mass > err);
  }
}

TEST_CASE("boost alpha is monotone in the learning rate for fixed error") {
  double err = 0.2, k = 4.0;
  double prev = 0.0;
  for (double lr : {0.01, 0.1, 0.5, 1.0}) {
    double alpha = lr * (std::log((1 - err) / err) + std::log(k - 1.0));
    CHECK(alpha > prev);
    prev = alpha;
  }
}

TEST_CASE("vanishing learning rate drives every stage weight toward zero") {
  std::vector<BlobSpec> spec = {{{0.0, 0.0}, 1.5, 40, "a"},
                                {{2.0, 0.0}, 1.5, 40, "b"},
                                {{0.0, 2.0}, 1.5, 40, "c"}};
  auto ds = synth_blobs(spec, 15);
  auto model = fit_adaboost(ds, 5, 1e-9, 2, 1);
  REQUIRE(model.stages().size() == 5);
  for (const auto& s : model.stages()) {
    CHECK(s.alpha > 0.0);
    CHECK(s.alpha < 1e-6);
  }
}

TEST_CASE("single-stage boost predicts one-hot") {
  auto ds = tiny({0.0, 1.0, 5.0, 6.0}, {0, 0, 1, 1});
  auto model = fit_adaboost(ds, 1, 0.5, 1, 0);
  auto p = model.predict_proba(std::vector<double>{0.2});
  CHECK(p[0] == 1.0);
  CHECK(p[1] == 0.0);
}

TEST_CASE("boost probability output is normalized across stages") {
  std::vector<BlobSpec> spec = {{{0.0, 0.0}, 1.5, 40, "a"},
                                {{2.0, 0.0}, 1.5, 40, "b"},
                                {{0.0, 2.0}, 1.5, 40, "c"}};
  auto ds = synth_blobs(spec, 10);
  auto model = fit_adaboost(ds, 20, 0.3, 1, 3);
  REQUIRE(model.stages().size() >= 2);
  auto p = model.predict_proba(std::vector<double>{1.0, 1.0});
  double sum = 0.0;
  for (double v : p) {
    CHECK(v >= 0.0);
    sum += v;
  }
  CHECK(sum == Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("voting averages member probabilities") {
  struct Fixed final : Classifier {
    std::vector<double> out;
    explicit Fixed(std::vector<double> o) : out(std::move(o)) {}
    std::size_t n_features() const override { return 1; }
    std::size_t n_classes() const override { return out.size(); }
    void predict_proba_into(std::span<const double>, std::span<double> dst) const override {
      std::copy(out.begin(), out.end(), dst.begin());
    }
  };
  auto a = std::make_shared<Fixed>(std::vector<double>{0.8, 0.2});
  auto b = std::make_shared<Fixed>(std::vector<double>{0.4, 0.6});

  SECTION("equal weights give the plain mean") {
    VotingModel vote({a, b}, {});
    auto p = vote.predict_proba(std::vector<double>{0.0});
    CHECK(p[0] == Catch::Approx(0.6).epsilon(1e-12));
    CHECK(p[1] == Catch::Approx(0.4).epsilon(1e-12));
    CHECK(vote.predict(std::vector<double>{0.0}) == 0);
  }
  SECTION("unanimous members pass through") {
    VotingModel vote({a, a, a}, {});
    auto p = vote.predict_proba(std::vector<double>{0.0});
    CHECK(p[0] == Catch::Approx(0.8).epsilon(1e-12));
  }
  SECTION("degenerate weight selects one member") {
    VotingModel vote({a, b}, {1.0, 0.0});
    auto p = vote.predict_proba(std::vector<double>{0.0});
    CHECK(p[0] == 0.8);
    CHECK(p[1] == 0.2);
  }
  SECTION("a single member is rejected") {
    CHECK_THROWS_AS(VotingModel({a}, {}), data_error);
  }
  SECTION("mismatched members are rejected") {
    auto c = std::make_shared<Fixed>(std::vector<double>{0.2, 0.3, 0.5});
    CHECK_THROWS_AS(VotingModel({a, c}, {}), data_error);
  }
}

TEST_CASE("voting of forest and boost works end to end") {
  auto ds = separable_blobs(12, 30);
  auto forest = std::make_shared<ForestModel>(fit_forest(ds, 25, 0.75, std::nullopt, 1));
  auto boost = std::make_shared<BoostModel>(fit_adaboost(ds, 25, 0.5, 3, 2));
  auto vote = fit_voting({forest, boost});
  CHECK(weighted_accuracy(vote, ds) >= 0.95);

  // when all members agree on the argmax, voting keeps it
  for (std::size_t i = 0; i < 10; ++i) {
    auto pf = forest->predict(ds.row(i));
    auto pb = boost->predict(ds.row(i));
    if (pf == pb) CHECK(vote.predict(ds.row(i)) == pf);
  }
}
