#include "emg/heuristics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace emg {

namespace {

// Best accuracy threshold for "statistic > T => CLENCH else RELAX" over the
// midpoints of consecutive sorted unique statistics. Smallest T wins ties so
// the fit is deterministic.
double fit_gate(const std::vector<double>& stats, const std::vector<Class>& labels) {
  if (stats.empty()) throw std::invalid_argument("heuristic fit: empty training set");
  std::vector<double> sorted = stats;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

  std::vector<double> candidates;
  candidates.push_back(sorted.front() > 0.0 ? sorted.front() / 2.0 : 0.5);
  for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
    candidates.push_back((sorted[i] + sorted[i + 1]) / 2.0);
  }

  double best_t = candidates.front();
  std::size_t best_correct = 0;
  bool first = true;
  for (const double t : candidates) {
    std::size_t correct = 0;
    for (std::size_t i = 0; i < stats.size(); ++i) {
      const Class pred = stats[i] > t ? Class::CLENCH : Class::RELAX;
      if (pred == labels[i]) ++correct;
    }
    if (first || correct > best_correct) {
      best_correct = correct;
      best_t = t;
      first = false;
    }
  }
  return best_t;
}

}  // namespace

double window_peak_amplitude(const Window& w) {
  double sum = 0.0;
  for (const auto s : w.samples) sum += s;
  const double mean = sum / static_cast<double>(w.samples.size());
  double peak = 0.0;
  for (const auto s : w.samples) peak = std::max(peak, std::abs(s - mean));
  return peak;
}

double window_variance(const Window& w) {
  const std::size_t n = w.samples.size();
  double sum = 0.0;
  for (const auto s : w.samples) sum += s;
  const double mean = sum / static_cast<double>(n);
  double sq = 0.0;
  for (const auto s : w.samples) {
    const double c = s - mean;
    sq += c * c;
  }
  return n > 1 ? sq / static_cast<double>(n - 1) : 0.0;
}

Class threshold_predict(const ThresholdModel& m, const Window& w) {
  return window_peak_amplitude(w) > m.threshold ? Class::CLENCH : Class::RELAX;
}

ThresholdModel fit_threshold(const Dataset& train) {
  std::vector<double> stats;
  stats.reserve(train.windows.size());
  for (const auto& w : train.windows) stats.push_back(window_peak_amplitude(w));
  return ThresholdModel{fit_gate(stats, dataset_labels(train))};
}

Class variance_predict(const VarianceModel& m, const Window& w) {
  return window_variance(w) > m.threshold ? Class::CLENCH : Class::RELAX;
}

VarianceModel fit_variance(const Dataset& train) {
  std::vector<double> stats;
  stats.reserve(train.windows.size());
  for (const auto& w : train.windows) stats.push_back(window_variance(w));
  return VarianceModel{fit_gate(stats, dataset_labels(train))};
}

}  // namespace emg
