#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "emg/dataio.hpp"

namespace emg {

// Analysis parameters are fixed by the pipeline: 256-point FFT, hop 16,
// 64 mel bands over 0..500 Hz at the 1 kHz sample rate.
constexpr int kFftSize = 256;
constexpr int kHopLen = 16;
constexpr int kNumMels = 64;
constexpr int kNumFftBins = kFftSize / 2 + 1;                       // 129
constexpr int kNumFrames = (kWindowLen - kFftSize) / kHopLen + 1;   // 47
constexpr double kMelPowerFloor = 1e-10;
const double kMelDbFloor = 10.0 * std::log10(kMelPowerFloor);       // -100 dB

// Dense row-major matrix, just enough for spectrogram plumbing.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
  double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

struct MelSpectrogram {
  Matrix values;  // kNumMels x kNumFrames, dB
};

// One-sided STFT power |X|^2 (129 x 47): the window is mean-centered once,
// then split into 256-sample frames every 16 samples (no padding), each
// multiplied by a periodic Hann window before the transform.
Matrix stft_power(const Window& w);

// Triangular filters (64 x 129) with corners equally spaced on the mel scale
// between 0 Hz and the 500 Hz Nyquist, mel = 2595 log10(1 + f/700); each
// triangle peaks at 1.
Matrix mel_filterbank();
// Hz center of each filter row, exposed for tests and inspection tooling.
std::array<double, kNumMels> mel_center_frequencies_hz();

// 10 log10(max(filterbank * stft_power, 1e-10)); every cell >= kMelDbFloor.
MelSpectrogram mel_spectrogram(const Window& w);

// Exports for inspection: plain CSV of dB values (64 rows x 47 columns) and
// an 8-bit binary PGM with dB mapped linearly onto [0, 255].
std::string mel_to_csv(const MelSpectrogram& m);
std::string mel_to_pgm(const MelSpectrogram& m);

}  // namespace emg
