#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "emg/features.hpp"

namespace emg {

// Regression tree used by the boosted model; leaves carry additive logit
// weights. Thresholds are float32, same policy as classification trees.
struct RegTreeNode {
  std::int8_t feature = -1;
  float threshold = 0.0f;
  std::int32_t left = -1;
  std::int32_t right = -1;
  double weight = 0.0;
};

struct RegTree {
  std::vector<RegTreeNode> nodes;
  double eval(const std::array<double, kNumFeatures>& v) const;
};

struct GbtConfig {
  int n_rounds = 50;
  double learning_rate = 0.1;  // eta
  double lambda = 1.0;         // leaf L2
  double gamma = 0.0;          // per-split penalty
  int max_depth = 3;
  int min_samples_split = 2;
};

// Gradient-boosted trees on the softmax cross-entropy: one tree per class per
// round, exact greedy splits over all features (no subsampling anywhere, so
// training is fully deterministic). Leaf weight is -G/(H+lambda); split gain
// is the usual second-order formula minus gamma and must be positive.
struct GbtModel {
  GbtConfig cfg;
  std::array<double, 3> base_score{};               // initial logits (zero)
  std::vector<std::array<RegTree, 3>> rounds;       // rounds x classes
  std::vector<double> train_log_loss;               // loss after each round
};

GbtModel train_gbt(const std::vector<std::array<double, kNumFeatures>>& x,
                   const std::vector<Class>& y, const GbtConfig& cfg);
std::array<double, 3> gbt_proba(const GbtModel& m, const std::array<double, kNumFeatures>& v);
Class gbt_predict(const GbtModel& m, const std::array<double, kNumFeatures>& v);

}  // namespace emg
