#include "emg/forest.hpp"

#include <stdexcept>

namespace emg {

Forest train_forest(const std::vector<std::array<double, kNumFeatures>>& x,
                    const std::vector<Class>& y, const ForestConfig& cfg) {
  if (x.empty() || x.size() != y.size()) throw std::invalid_argument("forest: bad training set");
  if (cfg.n_trees < 1) throw std::invalid_argument("forest: need at least one tree");

  Forest f;
  f.cfg = cfg;
  f.trees.resize(cfg.n_trees);
  const std::uint32_t n = static_cast<std::uint32_t>(x.size());

#pragma omp parallel for schedule(dynamic)
  for (int t = 0; t < cfg.n_trees; ++t) {
    // One generator per tree, seeded by base seed + tree index, so the forest
    // is identical no matter how trees are scheduled across threads.
    Xoshiro256ss rng(cfg.seed + static_cast<std::uint64_t>(t));
    std::vector<std::uint32_t> bootstrap(n);
    for (std::uint32_t i = 0; i < n; ++i) {
      bootstrap[i] = static_cast<std::uint32_t>(rng.uniform_int(n));
    }
    f.trees[t] = train_tree(x, y, bootstrap, cfg.tree, rng);
  }
  return f;
}

Class forest_predict(const Forest& f, const std::array<double, kNumFeatures>& v) {
  std::array<std::uint32_t, 3> votes{};
  for (const auto& tree : f.trees) ++votes[static_cast<std::size_t>(tree.predict(v))];
  return argmax_class(votes);
}

std::array<double, 3> forest_proba(const Forest& f, const std::array<double, kNumFeatures>& v) {
  std::array<double, 3> acc{};
  for (const auto& tree : f.trees) {
    const auto& counts = tree.nodes[tree.leaf_index(v)].class_counts;
    const double total = static_cast<double>(counts[0]) + counts[1] + counts[2];
    for (int c = 0; c < 3; ++c) acc[c] += counts[c] / total;
  }
  for (double& p : acc) p /= static_cast<double>(f.trees.size());
  return acc;
}

std::vector<Class> forest_predict_batch(const Forest& f,
                                        const std::vector<std::array<double, kNumFeatures>>& x) {
  std::vector<Class> out(x.size());
  const std::int64_t n = static_cast<std::int64_t>(x.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    out[i] = forest_predict(f, x[i]);
  }
  return out;
}

}  // namespace emg
