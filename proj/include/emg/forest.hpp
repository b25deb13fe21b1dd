#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "emg/tree.hpp"

namespace emg {

struct ForestConfig {
  int n_trees = 100;
  std::uint64_t seed = 1738;
  TreeConfig tree;
};

struct Forest {
  std::vector<Tree> trees;
  ForestConfig cfg;
};

// Bagged Gini trees. Tree t trains on a with-replacement bootstrap drawn from
// its own xoshiro256** stream seeded with cfg.seed + t, so the result is
// byte-identical whether trees are built on one thread or many (training is
// an OpenMP parallel-for over trees).
Forest train_forest(const std::vector<std::array<double, kNumFeatures>>& x,
                    const std::vector<Class>& y, const ForestConfig& cfg);

// Modal class over the trees' hard votes, ties toward the smallest code.
Class forest_predict(const Forest& f, const std::array<double, kNumFeatures>& v);
// Mean of the per-tree leaf class-frequency distributions.
std::array<double, 3> forest_proba(const Forest& f, const std::array<double, kNumFeatures>& v);

std::vector<Class> forest_predict_batch(const Forest& f,
                                        const std::vector<std::array<double, kNumFeatures>>& x);

}  // namespace emg
