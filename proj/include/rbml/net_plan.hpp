#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "rbml/common.hpp"

namespace rbml {

enum class BlockKind { plain, bottleneck };

inline const char* to_string(BlockKind k) {
  return k == BlockKind::plain ? "plain" : "bottleneck";
}

// Configurable three-stage residual CNN: stem conv into stage widths
// {nf, 2nf, 4nf}, a transition conv plus nresb[s] residual blocks per stage,
// 2x pooling between stages, adaptive pooling and a two-layer head.
struct NetConfig {
  std::size_t nf = 8;
  BlockKind block_kind = BlockKind::plain;
  std::array<std::size_t, 3> nresb{0, 0, 0};
  bool batchnorm = false;
  std::size_t n_classes = 16;
  std::array<std::size_t, 3> input{224, 224, 3};  // height, width, channels
};

struct LayerPlan {
  std::string name;
  std::array<std::size_t, 3> out_shape;  // height, width, channels
  std::size_t params = 0;
};

struct NetPlan {
  std::vector<LayerPlan> layers;
  std::size_t total_params = 0;
  std::vector<std::string> notes;  // counting assumptions, recorded explicitly
};

// Static shape/parameter walk of the configured network. Convolutions count
// k*k*Cin*Cout + Cout; batchnorm adds a separate 2*Cout layer after every
// conv when enabled.
inline NetPlan plan_network(const NetConfig& cfg) {
  if (cfg.nf < 1) throw data_error("plan_network: nf must be >= 1");
  if (cfg.n_classes < 1) throw data_error("plan_network: n_classes must be >= 1");
  if (cfg.input[0] < 8 || cfg.input[1] < 8)
    throw data_error("plan_network: input must be at least 8x8 for three pooling stages");
  if (cfg.input[2] < 1) throw data_error("plan_network: input needs >= 1 channel");
  if (cfg.block_kind == BlockKind::bottleneck && cfg.nf % 4 != 0)
    throw data_error("plan_network: bottleneck blocks need nf divisible by 4");

  NetPlan plan;
  std::size_t h = cfg.input[0], w = cfg.input[1], c = cfg.input[2];

  auto add = [&](const std::string& name, std::size_t params) {
    plan.layers.push_back({name, {h, w, c}, params});
    plan.total_params += params;
  };
  auto conv = [&](const std::string& name, std::size_t k, std::size_t cout) {
    std::size_t params = k * k * c * cout + cout;
    c = cout;
    add(name, params);
    if (cfg.batchnorm) add(name + ".bn", 2 * cout);
  };

  conv("stem.conv", 3, cfg.nf);

  const std::array<std::size_t, 3> widths{cfg.nf, 2 * cfg.nf, 4 * cfg.nf};
  for (std::size_t s = 0; s < 3; ++s) {
    std::string stage = "stage" + std::to_string(s + 1);
    conv(stage + ".trans.conv", 3, widths[s]);
    for (std::size_t b = 0; b < cfg.nresb[s]; ++b) {
      std::string block = stage + ".block" + std::to_string(b + 1);
      if (cfg.block_kind == BlockKind::plain) {
        conv(block + ".conv1", 3, widths[s]);
        conv(block + ".conv2", 3, widths[s]);
      } else {
        conv(block + ".conv1", 1, widths[s] / 4);
        conv(block + ".conv2", 3, widths[s] / 4);
        conv(block + ".conv3", 1, widths[s]);
      }
    }
    h /= 2;
    w /= 2;
    add(stage + ".pool", 0);
  }

  h = 1;
  w = 1;
  add("head.avgpool", 0);

  std::size_t flat = widths[2];
  std::size_t hidden = widths[2] / 2;
  c = hidden;
  add("head.fc1", flat * hidden + hidden);
  c = cfg.n_classes;
  add("head.fc2", hidden * cfg.n_classes + cfg.n_classes);

  plan.notes = {
      "transition convs are 3x3, stride 1",
      "bottleneck squeeze ratio 4 (width -> width/4 -> width)",
      "conv biases counted even with batchnorm enabled",
      "head widths: 4nf -> 2nf -> n_classes",
      "pooling halves spatial dims (floor); adaptive pool to 1x1",
  };
  return plan;
}

// Cross-entropy against the smoothed target (1-eps on the true class plus
// eps/K everywhere).
inline double label_smoothing_loss(std::span<const double> p, std::size_t true_class,
                                   double epsilon) {
  if (!(epsilon >= 0.0 && epsilon < 1.0))
    throw data_error("label_smoothing_loss: epsilon must lie in [0,1)");
  if (true_class >= p.size())
    throw data_error("label_smoothing_loss: class index out of range");
  double sum = 0.0;
  for (double v : p) {
    if (!(v > 0.0)) throw data_error("label_smoothing_loss: probabilities must be > 0");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-6)
    throw data_error("label_smoothing_loss: probabilities must sum to 1");

  const double k = static_cast<double>(p.size());
  double loss = 0.0;
  for (std::size_t c = 0; c < p.size(); ++c) {
    double q = epsilon / k + (c == true_class ? 1.0 - epsilon : 0.0);
    loss -= q * std::log(p[c]);
  }
  return loss;
}

// Named configurations; the *-like entries translate the classic four-stage
// block layouts onto this three-stage body, best-model is the tuned release
// configuration.
inline NetConfig net_preset(const std::string& name) {
  NetConfig cfg;
  cfg.n_classes = 16;
  cfg.input = {224, 224, 3};
  cfg.batchnorm = true;
  if (name == "resnet18-like") {
    cfg.nf = 64;
    cfg.block_kind = BlockKind::plain;
    cfg.nresb = {2, 2, 2};
  } else if (name == "resnet34-like") {
    cfg.nf = 64;
    cfg.block_kind = BlockKind::plain;
    cfg.nresb = {3, 4, 6};
  } else if (name == "resnet50-like") {
    cfg.nf = 64;
    cfg.block_kind = BlockKind::bottleneck;
    cfg.nresb = {3, 4, 6};
  } else if (name == "resnet101-like") {
    cfg.nf = 64;
    cfg.block_kind = BlockKind::bottleneck;
    cfg.nresb = {3, 4, 23};
  } else if (name == "best-model") {
    cfg.nf = 128;
    cfg.block_kind = BlockKind::bottleneck;
    cfg.nresb = {6, 10, 6};
  } else {
    throw data_error("unknown network preset: " + name);
  }
  return cfg;
}

}  // namespace rbml
