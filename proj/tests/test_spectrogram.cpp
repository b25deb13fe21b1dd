#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "emg/dataio.hpp"
#include "emg/reference.hpp"
#include "emg/spectrogram.hpp"
#include "oracles.hpp"

using namespace emg;
using doctest::Approx;

namespace {

std::vector<double> windowed_frame0(const Window& w) {
  double mean = 0.0;
  for (const auto s : w.samples) mean += s;
  mean /= static_cast<double>(w.samples.size());
  std::vector<double> frame(kFftSize);
  for (int i = 0; i < kFftSize; ++i) {
    const double hann = 0.5 * (1.0 - std::cos(2.0 * 3.14159265358979323846 * i / kFftSize));
    frame[i] = (static_cast<double>(w.samples[i]) - mean) * hann;
  }
  return frame;
}

}  // namespace

TEST_CASE("stft of a constant window is zero everywhere") {
  const Matrix p = stft_power(oracles::constant_window(1234));
  REQUIRE(p.rows == 129);
  REQUIRE(p.cols == 47);
  for (const double v : p.data) CHECK(v < 1e-18);
}

TEST_CASE("pure 125 Hz sine concentrates power in bin 32 of every frame") {
  const Matrix p = stft_power(oracles::sine_window(125.0, 400.0));
  for (int frame = 0; frame < kNumFrames; ++frame) {
    std::size_t argmax = 0;
    for (std::size_t k = 1; k < p.rows; ++k) {
      if (p.at(k, frame) > p.at(argmax, frame)) argmax = k;
    }
    CHECK(argmax == 32);  // 125 / 1000 * 256
  }
}

TEST_CASE("frame 0 satisfies Parseval against the time-domain energy") {
  SynthConfig cfg;
  cfg.n_windows_per_class = 1;
  const Dataset ds = synth_dataset(cfg);
  for (const Window& w : ds.windows) {
    const Matrix p = stft_power(w);
    const std::vector<double> frame = windowed_frame0(w);
    double time_energy = 0.0;
    for (const double v : frame) time_energy += v * v;

    double freq_energy = p.at(0, 0) + p.at(128, 0);
    for (int k = 1; k < 128; ++k) freq_energy += 2.0 * p.at(k, 0);
    freq_energy /= kFftSize;

    CHECK(freq_energy == Approx(time_energy).epsilon(1e-6));
  }
}

TEST_CASE("fft power of frame 0 matches the quadratic-time dft") {
  const Window w = oracles::sine_window(60.0, 300.0);
  const Matrix p = stft_power(w);
  const auto ref = reference::dft_power(windowed_frame0(w));
  REQUIRE(ref.size() == 129);
  for (int k = 0; k < 129; ++k) {
    CHECK(p.at(k, 0) == Approx(ref[k]).epsilon(1e-9).scale(1.0));
  }
}

TEST_CASE("mel filterbank rows are non-negative and unimodal") {
  const Matrix fb = mel_filterbank();
  REQUIRE(fb.rows == 64);
  REQUIRE(fb.cols == 129);
  for (std::size_t m = 0; m < fb.rows; ++m) {
    double peak = 0.0;
    std::size_t argmax = 0;
    for (std::size_t k = 0; k < fb.cols; ++k) {
      CHECK(fb.at(m, k) >= 0.0);
      if (fb.at(m, k) > peak) {
        peak = fb.at(m, k);
        argmax = k;
      }
    }
    CHECK(peak > 0.0);  // no empty filter at this resolution
    for (std::size_t k = 1; k <= argmax; ++k) CHECK(fb.at(m, k) >= fb.at(m, k - 1));
    for (std::size_t k = argmax + 1; k < fb.cols; ++k) CHECK(fb.at(m, k) <= fb.at(m, k - 1));
  }
}

TEST_CASE("constant window maps to the dB floor in every mel cell") {
  const MelSpectrogram mel = mel_spectrogram(oracles::constant_window(2048));
  REQUIRE(mel.values.rows == 64);
  REQUIRE(mel.values.cols == 47);
  for (const double v : mel.values.data) CHECK(v == kMelDbFloor);
}

TEST_CASE("mel spectrogram values never fall below the dB floor") {
  SynthConfig cfg;
  cfg.n_windows_per_class = 1;
  for (const Window& w : synth_dataset(cfg).windows) {
    const MelSpectrogram mel = mel_spectrogram(w);
    CHECK(mel.values.cols == 47);
    for (const double v : mel.values.data) CHECK(v >= kMelDbFloor);
  }
}

TEST_CASE("125 Hz sine lands in the mel row whose center is nearest 125 Hz") {
  const auto centers = mel_center_frequencies_hz();
  std::size_t nearest = 0;
  for (std::size_t m = 1; m < centers.size(); ++m) {
    if (std::abs(centers[m] - 125.0) < std::abs(centers[nearest] - 125.0)) nearest = m;
  }

  const MelSpectrogram mel = mel_spectrogram(oracles::sine_window(125.0, 400.0));
  std::vector<double> row_mean(kNumMels, 0.0);
  for (int m = 0; m < kNumMels; ++m) {
    for (int t = 0; t < kNumFrames; ++t) row_mean[m] += mel.values.at(m, t);
  }
  const std::size_t argmax =
      static_cast<std::size_t>(std::max_element(row_mean.begin(), row_mean.end()) -
                               row_mean.begin());
  CHECK(argmax == nearest);
}

TEST_CASE("mel exports have the documented shapes") {
  const MelSpectrogram mel = mel_spectrogram(oracles::sine_window(40.0, 200.0));
  const std::string csv = mel_to_csv(mel);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 64);
  const std::size_t first_line = csv.find('\n');
  CHECK(std::count(csv.begin(), csv.begin() + static_cast<long>(first_line), ',') == 46);

  const std::string pgm = mel_to_pgm(mel);
  CHECK(pgm.rfind("P5\n47 64\n255\n", 0) == 0);
  CHECK(pgm.size() == std::string("P5\n47 64\n255\n").size() + 64 * 47);
}
