#pragma once

#include <array>
#include <vector>

#include "emg/features.hpp"

namespace emg {

// k-nearest-neighbors over standardized feature vectors, Euclidean metric.
// Vote ties break toward the smallest class code; distance ties keep
// training-set insertion order.
struct KnnModel {
  int k = 5;
  std::vector<std::array<double, kNumFeatures>> points;
  std::vector<Class> labels;
};

KnnModel make_knn(int k, std::vector<std::array<double, kNumFeatures>> points,
                  std::vector<Class> labels);  // throws if k > point count
Class knn_predict(const KnnModel& m, const std::array<double, kNumFeatures>& v);
std::array<double, 3> knn_proba(const KnnModel& m, const std::array<double, kNumFeatures>& v);

}  // namespace emg
