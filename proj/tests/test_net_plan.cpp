#include <catch2/catch_amalgamated.hpp>

#include "rbml/net_plan.hpp"

using namespace rbml;

namespace {

std::size_t conv_census(const NetPlan& plan) {
  std::size_t convs = 0;
  for (const auto& l : plan.layers)
    if (l.name.find("conv") != std::string::npos && !l.name.ends_with(".bn")) ++convs;
  return convs;
}

}  // namespace

TEST_CASE("minimal plain config matches the hand-counted parameter total") {
  NetConfig cfg;
  cfg.nf = 8;
  cfg.block_kind = BlockKind::plain;
  cfg.nresb = {0, 0, 0};
  cfg.batchnorm = false;
  cfg.n_classes = 4;
  cfg.input = {32, 32, 3};
  auto plan = plan_network(cfg);

  // stem 3*3*3*8+8=224; transitions 584, 1168, 4640; head 32*16+16=528, 16*4+4=68
  CHECK(plan.total_params == 224 + 584 + 1168 + 4640 + 528 + 68);
  CHECK(conv_census(plan) == 4);  // stem + three transitions

  // spatial dims halve per pool, head input is 4*nf
  std::size_t expect_h = 32;
  for (const auto& l : plan.layers) {
    if (l.name.ends_with(".pool")) expect_h /= 2;
    CHECK(l.out_shape[0] >= 1);
  }
  CHECK(expect_h == 4);
  for (const auto& l : plan.layers)
    if (l.name == "head.avgpool") {
      CHECK(l.out_shape == std::array<std::size_t, 3>{1, 1, 32});
    }
}

TEST_CASE("the release configuration plans without error") {
  NetConfig cfg;
  cfg.nf = 128;
  cfg.block_kind = BlockKind::bottleneck;
  cfg.nresb = {6, 10, 6};
  cfg.batchnorm = true;
  cfg.n_classes = 16;
  cfg.input = {224, 224, 3};
  auto plan = plan_network(cfg);
  CHECK(plan.total_params > 0);
  CHECK(conv_census(plan) == 1 + 3 + 3 * (6 + 10 + 6));
  CHECK(plan.layers.back().out_shape[2] == 16);

  auto preset = plan_network(net_preset("best-model"));
  CHECK(preset.total_params == plan.total_params);
}

TEST_CASE("conv census follows the block formulas") {
  for (std::size_t n : {1, 2, 4}) {
    NetConfig plain;
    plain.nf = 8;
    plain.nresb = {n, n, n};
    plain.input = {32, 32, 3};
    CHECK(conv_census(plan_network(plain)) == 1 + 3 + 6 * n);

    NetConfig bn = plain;
    bn.block_kind = BlockKind::bottleneck;
    CHECK(conv_census(plan_network(bn)) == 1 + 3 + 9 * n);
  }
}

TEST_CASE("total params are strictly monotone in nf and each nresb entry") {
  NetConfig base;
  base.nf = 8;
  base.nresb = {1, 1, 1};
  base.input = {32, 32, 3};
  auto before = plan_network(base).total_params;

  for (int axis = 0; axis < 3; ++axis) {
    NetConfig more = base;
    more.nresb[static_cast<std::size_t>(axis)] += 1;
    CHECK(plan_network(more).total_params > before);
  }
  NetConfig wider = base;
  wider.nf = 12;
  CHECK(plan_network(wider).total_params > before);
}

TEST_CASE("batchnorm adds exactly 2*Cout per conv") {
  NetConfig cfg;
  cfg.nf = 8;
  cfg.nresb = {1, 0, 0};
  cfg.input = {16, 16, 3};
  auto off = plan_network(cfg);
  cfg.batchnorm = true;
  auto on = plan_network(cfg);
  // convs: stem(8) + t1(8) + block(8,8) + t2(16) + t3(32)
  CHECK(on.total_params - off.total_params == 2 * (8 + 8 + 8 + 8 + 16 + 32));
}

TEST_CASE("invalid configurations are rejected") {
  NetConfig cfg;
  cfg.nf = 6;
  cfg.block_kind = BlockKind::bottleneck;
  CHECK_THROWS_AS(plan_network(cfg), data_error);  // nf not divisible by 4

  NetConfig small;
  small.input = {4, 32, 3};
  CHECK_THROWS_AS(plan_network(small), data_error);  // too small for 3 pools

  CHECK_THROWS_AS(net_preset("resnet152-like"), data_error);
}

TEST_CASE("label smoothing analytic cases") {
  std::vector<double> p = {0.7, 0.1, 0.1, 0.1};
  CHECK(label_smoothing_loss(p, 0, 0.0) == Catch::Approx(-std::log(0.7)).epsilon(1e-12));

  std::vector<double> uniform(16, 1.0 / 16.0);
  for (double eps : {0.0, 0.1, 0.5}) {
    CHECK(label_smoothing_loss(uniform, 3, eps) ==
          Catch::Approx(std::log(16.0)).margin(1e-9));
  }
  CHECK(label_smoothing_loss(uniform, 3, 0.0) == Catch::Approx(2.7726).margin(1e-4));

  // worked case: K=4, eps=0.1, p=(0.7,0.1,0.1,0.1), true=0
  CHECK(label_smoothing_loss(p, 0, 0.1) == Catch::Approx(0.502618).margin(1e-5));
}

TEST_CASE("label smoothing is minimized at the smoothed target") {
  const std::size_t k = 4;
  const double eps = 0.2;
  std::vector<double> q(k, eps / k);
  q[1] += 1.0 - eps;
  double at_target = label_smoothing_loss(q, 1, eps);

  rng_engine rng(3);
  std::uniform_real_distribution<double> jitter(-0.05, 0.05);
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<double> p = q;
    double sum = 0.0;
    for (auto& v : p) {
      v = std::max(1e-6, v + jitter(rng));
      sum += v;
    }
    for (auto& v : p) v /= sum;
    CHECK(label_smoothing_loss(p, 1, eps) >= at_target - 1e-12);
  }
}

TEST_CASE("label smoothing rejects invalid input") {
  std::vector<double> p = {0.5, 0.5};
  CHECK_THROWS_AS(label_smoothing_loss(p, 0, 1.0), data_error);
  CHECK_THROWS_AS(label_smoothing_loss(p, 5, 0.1), data_error);
  std::vector<double> zero = {1.0, 0.0};
  CHECK_THROWS_AS(label_smoothing_loss(zero, 0, 0.1), data_error);
  std::vector<double> unnorm = {0.9, 0.9};
  CHECK_THROWS_AS(label_smoothing_loss(unnorm, 0, 0.1), data_error);
}
