#include "emg/gbt.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace emg {

namespace {

constexpr double kMinGain = 1e-12;

struct GradHess {
  double g = 0.0;
  double h = 0.0;
};

struct SplitChoice {
  bool found = false;
  int feature = -1;
  float threshold = 0.0f;
};

double leaf_weight(double g, double h, double lambda) { return -g / (h + lambda); }

// Second-order split gain (factor 1/2 omitted, it scales every candidate and
// the gamma penalty is applied on the halved form as usual).
double split_gain(double gl, double hl, double gr, double hr, double lambda, double gamma) {
  const double score = gl * gl / (hl + lambda) + gr * gr / (hr + lambda) -
                       (gl + gr) * (gl + gr) / (hl + hr + lambda);
  return 0.5 * score - gamma;
}

class RegTreeBuilder {
 public:
  RegTreeBuilder(const std::vector<std::array<double, kNumFeatures>>& x,
                 const std::vector<GradHess>& gh, const GbtConfig& cfg)
      : x_(x), gh_(gh), cfg_(cfg) {}

  RegTree build() {
    std::vector<std::uint32_t> idx(x_.size());
    for (std::uint32_t i = 0; i < idx.size(); ++i) idx[i] = i;
    RegTree tree;
    grow(tree, idx, 0, static_cast<std::uint32_t>(idx.size()), 0);
    return tree;
  }

 private:
  int grow(RegTree& tree, std::vector<std::uint32_t>& idx, std::uint32_t lo, std::uint32_t hi,
           int depth) {
    double g_sum = 0.0, h_sum = 0.0;
    for (std::uint32_t i = lo; i < hi; ++i) {
      g_sum += gh_[idx[i]].g;
      h_sum += gh_[idx[i]].h;
    }

    const int node_index = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    tree.nodes[node_index].weight = leaf_weight(g_sum, h_sum, cfg_.lambda);

    const std::uint32_t n = hi - lo;
    if (depth >= cfg_.max_depth || n < static_cast<std::uint32_t>(cfg_.min_samples_split)) {
      return node_index;
    }
    const SplitChoice best = find_split(idx, lo, hi, g_sum, h_sum);
    if (!best.found) return node_index;

    const double thr = static_cast<double>(best.threshold);
    const auto mid_it =
        std::stable_partition(idx.begin() + lo, idx.begin() + hi,
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

  SplitChoice find_split(const std::vector<std::uint32_t>& idx, std::uint32_t lo,
                         std::uint32_t hi, double g_sum, double h_sum) {
    SplitChoice best;
    double best_gain = 0.0;
    std::vector<std::pair<double, GradHess>> vals;
    vals.reserve(hi - lo);
    for (int feature = 0; feature < kNumFeatures; ++feature) {  // exact greedy, all features
      vals.clear();
      for (std::uint32_t i = lo; i < hi; ++i) {
        vals.emplace_back(x_[idx[i]][feature], gh_[idx[i]]);
      }
      std::sort(vals.begin(), vals.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });

      double gl = 0.0, hl = 0.0;
      std::size_t pos = 0;
      for (std::size_t b = 1; b < vals.size(); ++b) {
        if (vals[b].first == vals[b - 1].first) continue;
        const float thr = static_cast<float>((vals[b - 1].first + vals[b].first) / 2.0);
        const double thr_d = static_cast<double>(thr);
        while (pos < vals.size() && vals[pos].first <= thr_d) {
          gl += vals[pos].second.g;
          hl += vals[pos].second.h;
          ++pos;
        }
        if (pos == 0 || pos == vals.size()) continue;
        const double gain = split_gain(gl, hl, g_sum - gl, h_sum - hl, cfg_.lambda, cfg_.gamma);
        if (gain > kMinGain && gain > best_gain) {
          best.found = true;
          best.feature = feature;
          best.threshold = thr;
          best_gain = gain;
        }
      }
    }
    return best;
  }

  const std::vector<std::array<double, kNumFeatures>>& x_;
  const std::vector<GradHess>& gh_;
  const GbtConfig& cfg_;
};

std::array<double, 3> softmax(const std::array<double, 3>& z) {
  const double m = std::max({z[0], z[1], z[2]});
  std::array<double, 3> p;
  double sum = 0.0;
  for (int c = 0; c < 3; ++c) {
    p[c] = std::exp(z[c] - m);
    sum += p[c];
  }
  for (double& v : p) v /= sum;
  return p;
}

}  // namespace

double RegTree::eval(const std::array<double, kNumFeatures>& v) const {
  int idx = 0;
  while (nodes[idx].feature >= 0) {
    const RegTreeNode& node = nodes[idx];
    idx = v[node.feature] <= static_cast<double>(node.threshold) ? node.left : node.right;
  }
  return nodes[idx].weight;
}

GbtModel train_gbt(const std::vector<std::array<double, kNumFeatures>>& x,
                   const std::vector<Class>& y, const GbtConfig& cfg) {
  if (x.empty() || x.size() != y.size()) throw std::invalid_argument("gbt: bad training set");
  {
    std::array<std::size_t, 3> counts{};
    for (const Class c : y) ++counts[static_cast<std::size_t>(c)];
    for (int c = 0; c < 3; ++c) {
      if (counts[c] == 0) {
        throw std::runtime_error(std::string("gbt: class ") + class_name(static_cast<Class>(c)) +
                                 " absent from training data");
      }
    }
  }

  const std::size_t n = x.size();
  GbtModel model;
  model.cfg = cfg;
  std::vector<std::array<double, 3>> logits(n, model.base_score);

  for (int round = 0; round < cfg.n_rounds; ++round) {
    std::array<RegTree, 3> round_trees;
    std::vector<std::array<double, 3>> probs(n);
    for (std::size_t i = 0; i < n; ++i) probs[i] = softmax(logits[i]);

#pragma omp parallel for schedule(static) if (n > 512)
    for (int c = 0; c < 3; ++c) {
      std::vector<GradHess> gh_c(n);
      for (std::size_t i = 0; i < n; ++i) {
        const double p = probs[i][c];
        gh_c[i].g = p - (static_cast<int>(y[i]) == c ? 1.0 : 0.0);
        gh_c[i].h = p * (1.0 - p);
      }
      RegTreeBuilder builder(x, gh_c, cfg);
      round_trees[c] = builder.build();
    }

    for (std::size_t i = 0; i < n; ++i) {
      for (int c = 0; c < 3; ++c) {
        logits[i][c] += cfg.learning_rate * round_trees[c].eval(x[i]);
      }
    }
    model.rounds.push_back(std::move(round_trees));

    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto p = softmax(logits[i]);
      loss += -std::log(std::max(p[static_cast<std::size_t>(y[i])], 1e-300));
    }
    model.train_log_loss.push_back(loss / static_cast<double>(n));
  }
  return model;
}

std::array<double, 3> gbt_proba(const GbtModel& m, const std::array<double, kNumFeatures>& v) {
  std::array<double, 3> z = m.base_score;
  for (const auto& round : m.rounds) {
    for (int c = 0; c < 3; ++c) z[c] += m.cfg.learning_rate * round[c].eval(v);
  }
  return softmax(z);
}

Class gbt_predict(const GbtModel& m, const std::array<double, kNumFeatures>& v) {
  const auto p = gbt_proba(m, v);
  int best = 0;
  for (int c = 1; c < 3; ++c) {
    if (p[c] > p[best]) best = c;
  }
  return static_cast<Class>(best);
}

}  // namespace emg
