#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "emg/features.hpp"

namespace emg {

// Multinomial logistic regression trained by full-batch gradient descent on
// the L2-penalized cross-entropy. Weights start at zero, so training is
// deterministic. Inputs are standardized feature vectors of any dimension.
struct LogRegModel {
  std::size_t dim = kNumFeatures;
  std::vector<double> weights;       // kNumClasses x dim, row-major
  std::array<double, 3> bias{};
};

struct LogRegConfig {
  int iterations = 500;
  double learning_rate = 0.1;
  double l2 = 1e-4;
};

LogRegModel train_logreg(const std::vector<std::vector<double>>& x,
                         const std::vector<Class>& y, const LogRegConfig& cfg);
std::array<double, 3> logreg_proba(const LogRegModel& m, const std::vector<double>& v);

// Loss and analytic gradient of the training objective at given parameters,
// exposed so the finite-difference check can probe arbitrary points.
// Parameter layout: kNumClasses*dim weights then kNumClasses biases.
double logreg_loss(const std::vector<std::vector<double>>& x, const std::vector<Class>& y,
                   const std::vector<double>& params, std::size_t dim, double l2);
std::vector<double> logreg_gradient(const std::vector<std::vector<double>>& x,
                                    const std::vector<Class>& y,
                                    const std::vector<double>& params, std::size_t dim,
                                    double l2);

// Top-2 principal components of standardized features. Eigenpairs come from
// a cyclic Jacobi sweep over the 4x4 sample covariance; each component's
// largest-magnitude entry is made positive to pin the sign.
struct PcaModel {
  std::array<double, kNumFeatures> mean{};
  std::array<std::array<double, kNumFeatures>, 2> components{};
  std::array<double, 2> explained_variance_ratio{};
};

PcaModel pca_fit(const std::vector<std::array<double, kNumFeatures>>& x);
std::array<double, 2> pca_project(const PcaModel& m,
                                  const std::array<double, kNumFeatures>& v);

// Full eigendecomposition of a symmetric 4x4 matrix by cyclic Jacobi
// rotations; eigenvalues sorted descending, rows of `vectors` are the
// corresponding eigenvectors.
struct EigenResult {
  std::array<double, kNumFeatures> values{};
  std::array<std::array<double, kNumFeatures>, kNumFeatures> vectors{};
};
EigenResult jacobi_eigensolve(const std::array<std::array<double, kNumFeatures>, kNumFeatures>& a);

}  // namespace emg
