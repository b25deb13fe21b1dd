#pragma once

#include <vector>

#include "emg/features.hpp"
#include "emg/spectrogram.hpp"

namespace emg::reference {

// Serial, straight-line counterparts of the OpenMP kernels. They are kept in
// the library (not the tests) so the benchmark can time both paths and the
// tests can cross-check the production output against an independent
// implementation.

FeatureVector stat_features(const Window& w);
std::vector<FeatureVector> extract_features(const Dataset& ds);

// O(n^2) DFT power of one Hann-windowed frame; cross-checks the radix-2 FFT.
std::vector<double> dft_power(const std::vector<double>& frame);

}  // namespace emg::reference
