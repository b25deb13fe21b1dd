#include "emg/spectrogram.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <stdexcept>

namespace emg {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Iterative radix-2 Cooley-Tukey, in place. kFftSize is a power of two.
void fft_inplace(std::vector<std::complex<double>>& a) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double angle = -2.0 * kPi / static_cast<double>(len);
    const std::complex<double> wl(std::cos(angle), std::sin(angle));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> u = a[i + k];
        const std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wl;
      }
    }
  }
}

const std::vector<double>& hann_window() {
  // Periodic Hann, the analysis window used throughout.
  static const std::vector<double> w = [] {
    std::vector<double> h(kFftSize);
    for (int i = 0; i < kFftSize; ++i) {
      h[i] = 0.5 * (1.0 - std::cos(2.0 * kPi * i / kFftSize));
    }
    return h;
  }();
  return w;
}

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

}  // namespace

Matrix stft_power(const Window& w) {
  if (w.samples.size() != static_cast<std::size_t>(kWindowLen)) {
    throw std::invalid_argument("stft: window must hold 1000 samples");
  }
  double sum = 0.0;
  for (const auto s : w.samples) sum += s;
  const double mean = sum / kWindowLen;

  Matrix power(kNumFftBins, kNumFrames);
  const auto& hann = hann_window();
  std::vector<std::complex<double>> buf(kFftSize);
  for (int frame = 0; frame < kNumFrames; ++frame) {
    const int start = frame * kHopLen;
    for (int i = 0; i < kFftSize; ++i) {
      buf[i] = {(static_cast<double>(w.samples[start + i]) - mean) * hann[i], 0.0};
    }
    fft_inplace(buf);
    for (int k = 0; k < kNumFftBins; ++k) {
      power.at(k, frame) = std::norm(buf[k]);
    }
  }
  return power;
}

Matrix mel_filterbank() {
  Matrix fb(kNumMels, kNumFftBins);
  const double mel_max = hz_to_mel(kSampleRateHz / 2.0);
  const double step = mel_max / (kNumMels + 1);
  for (int m = 0; m < kNumMels; ++m) {
    const double f_lo = mel_to_hz(step * m);
    const double f_center = mel_to_hz(step * (m + 1));
    const double f_hi = mel_to_hz(step * (m + 2));
    for (int k = 0; k < kNumFftBins; ++k) {
      const double hz = static_cast<double>(k) * kSampleRateHz / kFftSize;
      double weight = 0.0;
      if (hz > f_lo && hz < f_center) {
        weight = (hz - f_lo) / (f_center - f_lo);
      } else if (hz >= f_center && hz < f_hi) {
        weight = (f_hi - hz) / (f_hi - f_center);
      }
      fb.at(m, k) = weight;
    }
  }
  return fb;
}

std::array<double, kNumMels> mel_center_frequencies_hz() {
  std::array<double, kNumMels> centers;
  const double step = hz_to_mel(kSampleRateHz / 2.0) / (kNumMels + 1);
  for (int m = 0; m < kNumMels; ++m) centers[m] = mel_to_hz(step * (m + 1));
  return centers;
}

MelSpectrogram mel_spectrogram(const Window& w) {
  const Matrix power = stft_power(w);
  const Matrix fb = mel_filterbank();
  MelSpectrogram mel;
  mel.values = Matrix(kNumMels, kNumFrames);
  for (int m = 0; m < kNumMels; ++m) {
    for (int t = 0; t < kNumFrames; ++t) {
      double acc = 0.0;
      for (int k = 0; k < kNumFftBins; ++k) acc += fb.at(m, k) * power.at(k, t);
      mel.values.at(m, t) = 10.0 * std::log10(std::max(acc, kMelPowerFloor));
    }
  }
  return mel;
}

std::string mel_to_csv(const MelSpectrogram& m) {
  std::string out;
  char buf[48];
  for (std::size_t r = 0; r < m.values.rows; ++r) {
    for (std::size_t c = 0; c < m.values.cols; ++c) {
      const int len = std::snprintf(buf, sizeof buf, "%.6f", m.values.at(r, c));
      if (c) out.push_back(',');
      out.append(buf, static_cast<std::size_t>(len));
    }
    out.push_back('\n');
  }
  return out;
}

std::string mel_to_pgm(const MelSpectrogram& m) {
  double lo = m.values.data.empty() ? 0.0 : m.values.data[0];
  double hi = lo;
  for (const double v : m.values.data) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double span = hi > lo ? hi - lo : 1.0;
  std::string out = "P5\n" + std::to_string(m.values.cols) + " " +
                    std::to_string(m.values.rows) + "\n255\n";
  for (const double v : m.values.data) {
    const int g = static_cast<int>(std::lround((v - lo) / span * 255.0));
    out.push_back(static_cast<char>(std::clamp(g, 0, 255)));
  }
  return out;
}

}  // namespace emg
