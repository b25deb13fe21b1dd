#include "emg/linear.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace emg {

namespace {

void softmax3(std::array<double, 3>& logits) {
  const double m = std::max({logits[0], logits[1], logits[2]});
  double sum = 0.0;
  for (double& v : logits) {
    v = std::exp(v - m);
    sum += v;
  }
  for (double& v : logits) v /= sum;
}

std::array<double, 3> scores_at(const std::vector<double>& params, std::size_t dim,
                                const std::vector<double>& v) {
  std::array<double, 3> z;
  for (int c = 0; c < 3; ++c) {
    double acc = params[3 * dim + c];  // bias block sits after the weights
    for (std::size_t d = 0; d < dim; ++d) acc += params[c * dim + d] * v[d];
    z[c] = acc;
  }
  return z;
}

void require_all_classes(const std::vector<Class>& y) {
  std::array<std::size_t, 3> counts{};
  for (const Class c : y) ++counts[static_cast<std::size_t>(c)];
  for (int c = 0; c < 3; ++c) {
    if (counts[c] == 0) {
      throw std::runtime_error(std::string("logreg: class ") +
                               class_name(static_cast<Class>(c)) + " absent from training data");
    }
  }
}

}  // namespace

double logreg_loss(const std::vector<std::vector<double>>& x, const std::vector<Class>& y,
                   const std::vector<double>& params, std::size_t dim, double l2) {
  const double n = static_cast<double>(x.size());
  double loss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    auto p = scores_at(params, dim, x[i]);
    softmax3(p);
    loss += -std::log(std::max(p[static_cast<std::size_t>(y[i])], 1e-300));
  }
  loss /= n;
  double reg = 0.0;
  for (std::size_t j = 0; j < 3 * dim; ++j) reg += params[j] * params[j];  // weights only
  return loss + 0.5 * l2 * reg;
}

std::vector<double> logreg_gradient(const std::vector<std::vector<double>>& x,
                                    const std::vector<Class>& y,
                                    const std::vector<double>& params, std::size_t dim,
                                    double l2) {
  const double n = static_cast<double>(x.size());
  std::vector<double> grad(params.size(), 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    auto p = scores_at(params, dim, x[i]);
    softmax3(p);
    p[static_cast<std::size_t>(y[i])] -= 1.0;
    for (int c = 0; c < 3; ++c) {
      for (std::size_t d = 0; d < dim; ++d) grad[c * dim + d] += p[c] * x[i][d];
      grad[3 * dim + c] += p[c];
    }
  }
  for (double& g : grad) g /= n;
  for (std::size_t j = 0; j < 3 * dim; ++j) grad[j] += l2 * params[j];
  return grad;
}

LogRegModel train_logreg(const std::vector<std::vector<double>>& x, const std::vector<Class>& y,
                         const LogRegConfig& cfg) {
  if (x.empty() || x.size() != y.size()) throw std::invalid_argument("logreg: bad training set");
  require_all_classes(y);
  const std::size_t dim = x[0].size();
  std::vector<double> params(3 * dim + 3, 0.0);
  for (int it = 0; it < cfg.iterations; ++it) {
    const auto grad = logreg_gradient(x, y, params, dim, cfg.l2);
    for (std::size_t j = 0; j < params.size(); ++j) params[j] -= cfg.learning_rate * grad[j];
  }
  LogRegModel m;
  m.dim = dim;
  m.weights.assign(params.begin(), params.begin() + 3 * dim);
  for (int c = 0; c < 3; ++c) m.bias[c] = params[3 * dim + c];
  return m;
}

std::array<double, 3> logreg_proba(const LogRegModel& m, const std::vector<double>& v) {
  if (v.size() != m.dim) throw std::invalid_argument("logreg: dimension mismatch");
  std::array<double, 3> z;
  for (int c = 0; c < 3; ++c) {
    double acc = m.bias[c];
    for (std::size_t d = 0; d < m.dim; ++d) acc += m.weights[c * m.dim + d] * v[d];
    z[c] = acc;
  }
  softmax3(z);
  return z;
}

EigenResult jacobi_eigensolve(
    const std::array<std::array<double, kNumFeatures>, kNumFeatures>& input) {
  constexpr int n = kNumFeatures;
  auto a = input;
  std::array<std::array<double, n>, n> v{};
  for (int i = 0; i < n; ++i) v[i][i] = 1.0;

  // Cyclic sweeps over the upper triangle until off-diagonal mass vanishes.
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
    }
    if (off < 1e-300) break;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        if (a[p][q] == 0.0) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
        for (int k = 0; k < n; ++k) {
          const double vkp = v[k][p], vkq = v[k][q];
          v[k][p] = c * vkp - s * vkq;
          v[k][q] = s * vkp + c * vkq;
        }
      }
    }
  }

  std::array<int, n> order{0, 1, 2, 3};
  std::sort(order.begin(), order.end(), [&](int i, int j) { return a[i][i] > a[j][j]; });
  EigenResult res;
  for (int r = 0; r < n; ++r) {
    res.values[r] = a[order[r]][order[r]];
    for (int k = 0; k < n; ++k) res.vectors[r][k] = v[k][order[r]];
  }
  return res;
}

PcaModel pca_fit(const std::vector<std::array<double, kNumFeatures>>& x) {
  if (x.size() < 3) throw std::invalid_argument("pca: need at least 3 samples");
  const double n = static_cast<double>(x.size());
  PcaModel m;
  for (const auto& v : x) {
    for (int d = 0; d < kNumFeatures; ++d) m.mean[d] += v[d];
  }
  for (int d = 0; d < kNumFeatures; ++d) m.mean[d] /= n;

  std::array<std::array<double, kNumFeatures>, kNumFeatures> cov{};
  for (const auto& v : x) {
    std::array<double, kNumFeatures> c;
    for (int d = 0; d < kNumFeatures; ++d) c[d] = v[d] - m.mean[d];
    for (int i = 0; i < kNumFeatures; ++i) {
      for (int j = 0; j < kNumFeatures; ++j) cov[i][j] += c[i] * c[j];
    }
  }
  for (auto& row : cov) {
    for (double& cell : row) cell /= (n - 1.0);
  }

  const EigenResult eig = jacobi_eigensolve(cov);
  double total = 0.0;
  for (const double lambda : eig.values) total += std::max(lambda, 0.0);
  for (int r = 0; r < 2; ++r) {
    auto vec = eig.vectors[r];
    // Sign convention: the largest-magnitude entry is positive.
    int arg = 0;
    for (int d = 1; d < kNumFeatures; ++d) {
      if (std::abs(vec[d]) > std::abs(vec[arg])) arg = d;
    }
    if (vec[arg] < 0.0) {
      for (double& e : vec) e = -e;
    }
    m.components[r] = vec;
    m.explained_variance_ratio[r] = total > 0.0 ? std::max(eig.values[r], 0.0) / total : 0.0;
  }
  return m;
}

std::array<double, 2> pca_project(const PcaModel& m, const std::array<double, kNumFeatures>& v) {
  std::array<double, 2> out{};
  for (int r = 0; r < 2; ++r) {
    for (int d = 0; d < kNumFeatures; ++d) out[r] += m.components[r][d] * (v[d] - m.mean[d]);
  }
  return out;
}

}  // namespace emg
