#include "emg/reference.hpp"

#include <cmath>

namespace emg::reference {

// Deliberately plain loops; this is the comparison baseline, not the fast path.

FeatureVector stat_features(const Window& w) {
  const int n = static_cast<int>(w.samples.size());
  double mean = 0.0;
  for (int i = 0; i < n; ++i) mean += w.samples[i];
  mean = mean / n;

  std::vector<double> centered(n);
  for (int i = 0; i < n; ++i) centered[i] = w.samples[i] - mean;

  double mav = 0.0;
  for (int i = 0; i < n; ++i) mav += std::abs(centered[i]);
  mav = mav / n;

  double var = 0.0;
  for (int i = 0; i < n; ++i) var += centered[i] * centered[i];
  const double sd = n > 1 ? std::sqrt(var / (n - 1)) : 0.0;

  double peak = 0.0;
  for (int i = 0; i < n; ++i) {
    if (std::abs(centered[i]) > peak) peak = std::abs(centered[i]);
  }

  int zcr = 0;
  int prev = 0;
  for (int i = 0; i < n; ++i) {
    int sign = 0;
    if (centered[i] > 0.0) sign = 1;
    if (centered[i] < 0.0) sign = -1;
    if (sign == 0) continue;
    if (prev != 0 && sign != prev) ++zcr;
    prev = sign;
  }

  FeatureVector f;
  f.mav = mav;
  f.sd = sd;
  f.max_amp = peak;
  f.zcr = zcr;
  return f;
}

std::vector<FeatureVector> extract_features(const Dataset& ds) {
  std::vector<FeatureVector> out;
  out.reserve(ds.windows.size());
  for (const Window& w : ds.windows) out.push_back(stat_features(w));
  return out;
}

std::vector<double> dft_power(const std::vector<double>& frame) {
  const int n = static_cast<int>(frame.size());
  const double two_pi = 2.0 * 3.14159265358979323846;
  std::vector<double> power(n / 2 + 1);
  for (int k = 0; k <= n / 2; ++k) {
    double re = 0.0, im = 0.0;
    for (int i = 0; i < n; ++i) {
      const double angle = two_pi * k * i / n;
      re += frame[i] * std::cos(angle);
      im -= frame[i] * std::sin(angle);
    }
    power[k] = re * re + im * im;
  }
  return power;
}

}  // namespace emg::reference
