#include "emg/knn.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "emg/tree.hpp"

namespace emg {

KnnModel make_knn(int k, std::vector<std::array<double, kNumFeatures>> points,
                  std::vector<Class> labels) {
  if (k < 1) throw std::invalid_argument("knn: k must be >= 1");
  if (points.size() != labels.size() || points.empty()) {
    throw std::invalid_argument("knn: bad training set");
  }
  if (static_cast<std::size_t>(k) > points.size()) {
    throw std::invalid_argument("knn: k exceeds training size");
  }
  return KnnModel{k, std::move(points), std::move(labels)};
}

namespace {

std::array<std::uint32_t, 3> neighbor_votes(const KnnModel& m,
                                            const std::array<double, kNumFeatures>& v) {
  std::vector<std::pair<double, std::size_t>> dist(m.points.size());
  for (std::size_t i = 0; i < m.points.size(); ++i) {
    double d2 = 0.0;
    for (int d = 0; d < kNumFeatures; ++d) {
      const double diff = m.points[i][d] - v[d];
      d2 += diff * diff;
    }
    dist[i] = {d2, i};
  }
  // Pair ordering makes distance ties fall back to insertion order.
  const std::size_t k = static_cast<std::size_t>(m.k);
  std::partial_sort(dist.begin(), dist.begin() + k, dist.end());
  std::array<std::uint32_t, 3> votes{};
  for (std::size_t i = 0; i < k; ++i) {
    ++votes[static_cast<std::size_t>(m.labels[dist[i].second])];
  }
  return votes;
}

}  // namespace

Class knn_predict(const KnnModel& m, const std::array<double, kNumFeatures>& v) {
  return argmax_class(neighbor_votes(m, v));
}

std::array<double, 3> knn_proba(const KnnModel& m, const std::array<double, kNumFeatures>& v) {
  const auto votes = neighbor_votes(m, v);
  std::array<double, 3> p{};
  for (int c = 0; c < 3; ++c) p[c] = static_cast<double>(votes[c]) / m.k;
  return p;
}

}  // namespace emg
