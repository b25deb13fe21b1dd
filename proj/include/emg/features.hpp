#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "emg/dataio.hpp"

namespace emg {

constexpr int kNumFeatures = 4;  // mav, sd, max, zcr

// Set A statistics of one window, computed on the mean-centered signal.
struct FeatureVector {
  double mav = 0.0;      // mean absolute value
  double sd = 0.0;       // sample standard deviation (N-1 divisor)
  double max_amp = 0.0;  // peak absolute amplitude
  int zcr = 0;           // strict sign changes, zero samples skipped

  std::array<double, kNumFeatures> as_array() const {
    return {mav, sd, max_amp, static_cast<double>(zcr)};
  }
};

FeatureVector extract_stat_features(const Window& w);

// Feature extraction for a whole dataset; parallel over windows when OpenMP
// is enabled, output order and values independent of thread count.
std::vector<FeatureVector> extract_features(const Dataset& ds);
std::vector<Class> dataset_labels(const Dataset& ds);

// Per-dimension affine map fitted on training data: (x - mean) / scale with
// scale the population standard deviation; zero-variance dimensions keep
// scale 1 so they pass through centered but unscaled.
struct Standardizer {
  std::array<double, kNumFeatures> mean{};
  std::array<double, kNumFeatures> scale{};

  std::array<double, kNumFeatures> apply(const FeatureVector& v) const;
  std::array<double, kNumFeatures> apply(const std::array<double, kNumFeatures>& v) const;
};

Standardizer fit_standardizer(const std::vector<FeatureVector>& x);  // throws on empty input

// CSV table `mav,sd,max,zcr,label`, one row per window.
std::string feature_table_csv(const std::vector<FeatureVector>& feats,
                              const std::vector<Class>& labels);

}  // namespace emg
