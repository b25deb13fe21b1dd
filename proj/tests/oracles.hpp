#pragma once

// Independent oracle implementations used only by tests. These deliberately
// do not share code with the library paths they check.

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "emg/dataio.hpp"

namespace oracles {

// Symmetric 4x4 eigensolver, greedy largest-off-diagonal-pivot Jacobi (the
// library uses cyclic sweeps). Returns eigenvalues descending with matching
// eigenvectors as rows.
struct Eigen4 {
  std::array<double, 4> values{};
  std::array<std::array<double, 4>, 4> vectors{};
};

inline Eigen4 max_pivot_jacobi(std::array<std::array<double, 4>, 4> a) {
  std::array<std::array<double, 4>, 4> v{};
  for (int i = 0; i < 4; ++i) v[i][i] = 1.0;

  for (int iter = 0; iter < 200; ++iter) {
    int p = 0, q = 1;
    double largest = 0.0;
    for (int i = 0; i < 4; ++i) {
      for (int j = i + 1; j < 4; ++j) {
        if (std::abs(a[i][j]) > largest) {
          largest = std::abs(a[i][j]);
          p = i;
          q = j;
        }
      }
    }
    if (largest < 1e-15) break;

    const double app = a[p][p], aqq = a[q][q], apq = a[p][q];
    const double phi = 0.5 * std::atan2(2.0 * apq, aqq - app);
    const double c = std::cos(phi), s = std::sin(phi);

    std::array<std::array<double, 4>, 4> r{};
    for (int i = 0; i < 4; ++i) r[i][i] = 1.0;
    r[p][p] = c;
    r[q][q] = c;
    r[p][q] = s;
    r[q][p] = -s;

    // a = r^T a r ; v = v r  (dense products, clarity over speed)
    std::array<std::array<double, 4>, 4> tmp{};
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        double acc = 0.0;
        for (int k = 0; k < 4; ++k) acc += r[k][i] * a[k][j];
        tmp[i][j] = acc;
      }
    }
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        double acc = 0.0;
        for (int k = 0; k < 4; ++k) acc += tmp[i][k] * r[k][j];
        a[i][j] = acc;
      }
    }
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) tmp[i][j] = v[i][j];
    }
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        double acc = 0.0;
        for (int k = 0; k < 4; ++k) acc += tmp[i][k] * r[k][j];
        v[i][j] = acc;
      }
    }
  }

  std::array<int, 4> order{0, 1, 2, 3};
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) {
      if (a[order[j]][order[j]] > a[order[i]][order[i]]) std::swap(order[i], order[j]);
    }
  }
  Eigen4 out;
  for (int r = 0; r < 4; ++r) {
    out.values[r] = a[order[r]][order[r]];
    for (int k = 0; k < 4; ++k) out.vectors[r][k] = v[k][order[r]];
  }
  return out;
}

// Central finite differences of a scalar function.
inline std::vector<double> central_differences(const std::function<double(const std::vector<double>&)>& f,
                                               std::vector<double> at, double h = 1e-6) {
  std::vector<double> grad(at.size());
  for (std::size_t j = 0; j < at.size(); ++j) {
    const double orig = at[j];
    at[j] = orig + h;
    const double hi = f(at);
    at[j] = orig - h;
    const double lo = f(at);
    at[j] = orig;
    grad[j] = (hi - lo) / (2.0 * h);
  }
  return grad;
}

// Window helpers.
inline emg::Window constant_window(int value, std::optional<emg::Class> label = {}) {
  emg::Window w;
  w.samples.assign(emg::kWindowLen, static_cast<std::uint16_t>(value));
  w.label = label;
  return w;
}

inline emg::Window window_from_centered(const std::vector<int>& centered, int baseline = 2048) {
  emg::Window w;
  w.samples.resize(emg::kWindowLen);
  for (int i = 0; i < emg::kWindowLen; ++i) {
    w.samples[i] = static_cast<std::uint16_t>(baseline + centered[i % centered.size()]);
  }
  return w;
}

inline emg::Window sine_window(double hz, double amplitude, int baseline = 2048) {
  emg::Window w;
  w.samples.resize(emg::kWindowLen);
  for (int i = 0; i < emg::kWindowLen; ++i) {
    const double t = static_cast<double>(i) / emg::kSampleRateHz;
    const double v = baseline + amplitude * std::sin(2.0 * 3.14159265358979323846 * hz * t);
    w.samples[i] = static_cast<std::uint16_t>(std::lround(v));
  }
  return w;
}

}  // namespace oracles
