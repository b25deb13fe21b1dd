#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "emg/features.hpp"
#include "emg/rng.hpp"

namespace emg {

// One node of a classification tree. Nodes live in a flat preorder vector;
// feature < 0 marks a leaf. Split thresholds are float32 from the moment the
// split is chosen so that the in-memory tree, the flat binary model and the
// generated source all compare against the exact same value.
struct TreeNode {
  std::int8_t feature = -1;
  float threshold = 0.0f;
  std::int32_t left = -1;
  std::int32_t right = -1;
  std::array<std::uint32_t, 3> class_counts{};
};

struct Tree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  int leaf_index(const std::array<double, kNumFeatures>& v) const;
  Class predict(const std::array<double, kNumFeatures>& v) const;
};

struct TreeConfig {
  int max_depth = 8;
  int min_samples_split = 2;
  int max_features = 2;  // features sampled per node (sqrt(4))
};

// Greedy CART on Gini impurity: candidate thresholds are midpoints of
// consecutive sorted unique values (rounded to float32, then the partition is
// re-derived); a node becomes a leaf when pure, at the depth cap, below the
// split size, or when no candidate improves impurity.
Tree train_tree(const std::vector<std::array<double, kNumFeatures>>& x,
                const std::vector<Class>& y, const std::vector<std::uint32_t>& sample_idx,
                const TreeConfig& cfg, Xoshiro256ss& rng);

// Gini impurity from integer class counts, computed as (n^2 - sum c^2)/n^2
// to keep simple count patterns exact in double arithmetic.
double gini_impurity(const std::array<std::uint64_t, 3>& counts);

Class argmax_class(const std::array<std::uint32_t, 3>& counts);  // ties -> smallest code
Class argmax_class(const std::array<double, 3>& scores);

}  // namespace emg
