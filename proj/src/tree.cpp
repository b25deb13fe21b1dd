#include "emg/tree.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace emg {

namespace {

// Class-preserving partitions can show ~1e-17 phantom gains because child
// proportions are not exactly representable; anything below this is "no gain".
constexpr double kMinGain = 1e-12;

struct BestSplit {
  bool found = false;
  int feature = -1;
  float threshold = 0.0f;
  double gain = 0.0;
};

double impurity(const std::array<std::uint64_t, 3>& counts, std::uint64_t n) {
  if (n == 0) return 0.0;
  std::uint64_t sq = 0;
  for (const auto c : counts) sq += c * c;
  const double n2 = static_cast<double>(n) * static_cast<double>(n);
  return (n2 - static_cast<double>(sq)) / n2;
}

}  // namespace

double gini_impurity(const std::array<std::uint64_t, 3>& counts) {
  return impurity(counts, counts[0] + counts[1] + counts[2]);
}

Class argmax_class(const std::array<std::uint32_t, 3>& counts) {
  int best = 0;
  for (int c = 1; c < 3; ++c) {
    if (counts[c] > counts[best]) best = c;
  }
  return static_cast<Class>(best);
}

Class argmax_class(const std::array<double, 3>& scores) {
  int best = 0;
  for (int c = 1; c < 3; ++c) {
    if (scores[c] > scores[best]) best = c;
  }
  return static_cast<Class>(best);
}

int Tree::leaf_index(const std::array<double, kNumFeatures>& v) const {
  int idx = 0;
  while (nodes[idx].feature >= 0) {
    const TreeNode& node = nodes[idx];
    idx = v[node.feature] <= static_cast<double>(node.threshold) ? node.left : node.right;
  }
  return idx;
}

Class Tree::predict(const std::array<double, kNumFeatures>& v) const {
  return argmax_class(nodes[leaf_index(v)].class_counts);
}

namespace {

class TreeBuilder {
 public:
  TreeBuilder(const std::vector<std::array<double, kNumFeatures>>& x,
              const std::vector<Class>& y, const TreeConfig& cfg, Xoshiro256ss& rng)
      : x_(x), y_(y), cfg_(cfg), rng_(rng) {}

  Tree build(std::vector<std::uint32_t> idx) {
    Tree tree;
    grow(tree, idx, 0, static_cast<std::uint32_t>(idx.size()), 0);
    return tree;
  }

 private:
  // Builds the node over idx[lo, hi) and returns its index (preorder).
  int grow(Tree& tree, std::vector<std::uint32_t>& idx, std::uint32_t lo, std::uint32_t hi,
           int depth) {
    std::array<std::uint64_t, 3> counts{};
    for (std::uint32_t i = lo; i < hi; ++i) ++counts[static_cast<std::size_t>(y_[idx[i]])];
    const std::uint64_t n = hi - lo;
    const double node_impurity = impurity(counts, n);

    const int node_index = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    for (int c = 0; c < 3; ++c) {
      tree.nodes[node_index].class_counts[c] = static_cast<std::uint32_t>(counts[c]);
    }

    const bool can_split = node_impurity > 0.0 && depth < cfg_.max_depth &&
                           n >= static_cast<std::uint64_t>(cfg_.min_samples_split);
    if (!can_split) return node_index;

    const BestSplit best = find_split(idx, lo, hi, counts, node_impurity);
    if (!best.found) return node_index;

    const double thr = static_cast<double>(best.threshold);
    const auto mid_it = std::stable_partition(
        idx.begin() + lo, idx.begin() + hi,
        [&](std::uint32_t s) { return x_[s][best.feature] <= thr; });
    const std::uint32_t mid = static_cast<std::uint32_t>(mid_it - idx.begin());

    tree.nodes[node_index].feature = static_cast<std::int8_t>(best.feature);
    tree.nodes[node_index].threshold = best.threshold;
    const int left = grow(tree, idx, lo, mid, depth + 1);
    const int right = grow(tree, idx, mid, hi, depth + 1);
    tree.nodes[node_index].left = left;
    tree.nodes[node_index].right = right;
    return node_index;
  }

  BestSplit find_split(const std::vector<std::uint32_t>& idx, std::uint32_t lo, std::uint32_t hi,
                       const std::array<std::uint64_t, 3>& parent_counts,
                       double parent_impurity) {
    // Random feature subset, partial Fisher-Yates on {0,1,2,3}.
    std::array<int, kNumFeatures> features{0, 1, 2, 3};
    const int n_try = std::clamp(cfg_.max_features, 1, kNumFeatures);
    for (int j = 0; j < n_try; ++j) {
      const int pick = j + static_cast<int>(rng_.uniform_int(kNumFeatures - j));
      std::swap(features[j], features[pick]);
    }

    const std::uint64_t n = hi - lo;
    BestSplit best;
    std::vector<std::pair<double, Class>> vals;
    vals.reserve(n);
    for (int j = 0; j < n_try; ++j) {
      const int feature = features[j];
      vals.clear();
      for (std::uint32_t i = lo; i < hi; ++i) {
        vals.emplace_back(x_[idx[i]][feature], y_[idx[i]]);
      }
      std::sort(vals.begin(), vals.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });

      // Candidate thresholds are midpoints between distinct consecutive
      // values, rounded to float32 up front; the sweep advances a single
      // cursor because the rounded thresholds are non-decreasing.
      std::array<std::uint64_t, 3> left_counts{};
      std::size_t pos = 0;
      for (std::size_t b = 1; b < vals.size(); ++b) {
        if (vals[b].first == vals[b - 1].first) continue;
        const float thr = static_cast<float>((vals[b - 1].first + vals[b].first) / 2.0);
        const double thr_d = static_cast<double>(thr);
        while (pos < vals.size() && vals[pos].first <= thr_d) {
          ++left_counts[static_cast<std::size_t>(vals[pos].second)];
          ++pos;
        }
        const std::uint64_t n_left = pos;
        if (n_left == 0 || n_left == n) continue;
        std::array<std::uint64_t, 3> right_counts;
        for (int c = 0; c < 3; ++c) right_counts[c] = parent_counts[c] - left_counts[c];
        const double w_left = static_cast<double>(n_left) / static_cast<double>(n);
        const double gain = parent_impurity - w_left * impurity(left_counts, n_left) -
                            (1.0 - w_left) * impurity(right_counts, n - n_left);
        if (gain > kMinGain && (!best.found || gain > best.gain)) {
          best.found = true;
          best.feature = feature;
          best.threshold = thr;
          best.gain = gain;
        }
      }
    }
    return best;
  }

  const std::vector<std::array<double, kNumFeatures>>& x_;
  const std::vector<Class>& y_;
  const TreeConfig& cfg_;
  Xoshiro256ss& rng_;
};

}  // namespace

Tree train_tree(const std::vector<std::array<double, kNumFeatures>>& x,
                const std::vector<Class>& y, const std::vector<std::uint32_t>& sample_idx,
                const TreeConfig& cfg, Xoshiro256ss& rng) {
  if (x.empty() || x.size() != y.size()) throw std::invalid_argument("tree: bad training set");
  if (sample_idx.empty()) throw std::invalid_argument("tree: no samples selected");
  TreeBuilder builder(x, y, cfg, rng);
  return builder.build(sample_idx);
}

}  // namespace emg
