#pragma once

#include <vector>

#include "emg/dataio.hpp"
#include "emg/features.hpp"

namespace emg {

// Model tier 0: amplitude gate on the centered peak. Emits CLENCH when the
// peak exceeds T, RELAX otherwise; NOISE is never predicted.
struct ThresholdModel {
  double threshold = 2000.0;
};

Class threshold_predict(const ThresholdModel& m, const Window& w);

// Fits T by scanning midpoints of the sorted unique per-window peaks and
// keeping the threshold with the best training accuracy (smallest T on ties).
ThresholdModel fit_threshold(const Dataset& train);

// Model tier 0b: energy gate on the sample variance (N-1 divisor).
struct VarianceModel {
  double threshold = 1.0;  // squared ADC counts
};

Class variance_predict(const VarianceModel& m, const Window& w);
VarianceModel fit_variance(const Dataset& train);

double window_peak_amplitude(const Window& w);  // max |x - mean|
double window_variance(const Window& w);

}  // namespace emg
