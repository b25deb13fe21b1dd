#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "emg/knn.hpp"
#include "emg/linear.hpp"
#include "emg/rng.hpp"
#include "oracles.hpp"

using namespace emg;
using doctest::Approx;

TEST_CASE("zero-initialized logreg outputs uniform probabilities") {
  LogRegModel m;
  m.dim = 4;
  m.weights.assign(12, 0.0);
  const auto p = logreg_proba(m, {1.0, -2.0, 0.5, 3.0});
  for (const double v : p) CHECK(v == Approx(1.0 / 3.0));
  CHECK(p[0] + p[1] + p[2] == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("logreg reaches 100% on a separable toy set") {
  std::vector<std::vector<double>> x;
  std::vector<Class> y;
  for (int i = 0; i < 20; ++i) {
    const double jitter = 0.01 * i;
    x.push_back({-2.0 - jitter, 0.0});
    y.push_back(Class::RELAX);
    x.push_back({2.0 + jitter, 0.0});
    y.push_back(Class::CLENCH);
    x.push_back({0.0, 2.0 + jitter});
    y.push_back(Class::NOISE);
  }
  LogRegConfig cfg;
  cfg.iterations = 2000;
  cfg.l2 = 1e-6;
  const LogRegModel m = train_logreg(x, y, cfg);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto p = logreg_proba(m, x[i]);
    int best = 0;
    for (int c = 1; c < 3; ++c) {
      if (p[c] > p[best]) best = c;
    }
    CHECK(static_cast<Class>(best) == y[i]);
  }
}

TEST_CASE("logreg probabilities sum to 1") {
  std::vector<std::vector<double>> x = {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}};
  std::vector<Class> y = {Class::RELAX, Class::CLENCH, Class::NOISE, Class::CLENCH};
  const LogRegModel m = train_logreg(x, y, {});
  for (const auto& v : x) {
    const auto p = logreg_proba(m, v);
    CHECK(p[0] + p[1] + p[2] == Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("logreg requires every class in training data") {
  std::vector<std::vector<double>> x = {{0.0}, {1.0}};
  std::vector<Class> y = {Class::RELAX, Class::CLENCH};
  CHECK_THROWS_AS(train_logreg(x, y, {}), std::runtime_error);
}

TEST_CASE("analytic gradient matches central differences at 10 random points") {
  Xoshiro256ss rng(1738);
  const std::size_t dim = 4;
  std::vector<std::vector<double>> x;
  std::vector<Class> y;
  for (int i = 0; i < 30; ++i) {
    std::vector<double> v(dim);
    for (auto& e : v) e = rng.normal();
    x.push_back(v);
    y.push_back(static_cast<Class>(i % 3));
  }
  const double l2 = 0.01;

  for (int point = 0; point < 10; ++point) {
    std::vector<double> params(3 * dim + 3);
    for (auto& p : params) p = rng.normal();

    const auto grad = logreg_gradient(x, y, params, dim, l2);
    const auto fd = oracles::central_differences(
        [&](const std::vector<double>& at) { return logreg_loss(x, y, at, dim, l2); }, params);

    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < grad.size(); ++j) {
      num += (grad[j] - fd[j]) * (grad[j] - fd[j]);
      den += grad[j] * grad[j];
    }
    INFO("point ", point);
    CHECK(std::sqrt(num) <= 1e-5 * std::max(std::sqrt(den), 1e-12));
  }
}

TEST_CASE("pca on collinear data explains everything with one component") {
  std::vector<std::array<double, 4>> x;
  for (int i = 0; i < 50; ++i) {
    const double t = 0.1 * i - 2.0;
    x.push_back({t, 2.0 * t, 3.0 * t, 4.0 * t});
  }
  const PcaModel m = pca_fit(x);
  CHECK(m.explained_variance_ratio[0] == Approx(1.0).epsilon(1e-9));
  CHECK(m.explained_variance_ratio[1] == Approx(0.0).scale(1.0).epsilon(1e-9));
}

TEST_CASE("pca ratios on an isotropic cloud approach one quarter each") {
  Xoshiro256ss rng(42);
  std::vector<std::array<double, 4>> x;
  for (int i = 0; i < 4000; ++i) {
    x.push_back({rng.normal(), rng.normal(), rng.normal(), rng.normal()});
  }
  const PcaModel m = pca_fit(x);
  CHECK(std::abs(m.explained_variance_ratio[0] - 0.25) < 0.03);
  CHECK(std::abs(m.explained_variance_ratio[1] - 0.25) < 0.03);
  CHECK(m.explained_variance_ratio[0] >= m.explained_variance_ratio[1]);
}

TEST_CASE("library eigensolver agrees with the max-pivot jacobi oracle") {
  Xoshiro256ss rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    std::array<std::array<double, 4>, 4> a{};
    for (int i = 0; i < 4; ++i) {
      for (int j = i; j < 4; ++j) {
        a[i][j] = a[j][i] = rng.normal();
      }
      a[i][i] += 4.0;  // keep it comfortably symmetric positive-ish
    }
    const EigenResult lib = jacobi_eigensolve(a);
    const oracles::Eigen4 ref = oracles::max_pivot_jacobi(a);
    for (int r = 0; r < 4; ++r) {
      CHECK(lib.values[r] == Approx(ref.values[r]).epsilon(1e-10).scale(1.0));
      // Vectors match up to sign.
      double dot = 0.0;
      for (int k = 0; k < 4; ++k) dot += lib.vectors[r][k] * ref.vectors[r][k];
      CHECK(std::abs(std::abs(dot) - 1.0) < 1e-8);
    }
  }
}

TEST_CASE("pca eigenvectors are orthonormal with the documented sign convention") {
  Xoshiro256ss rng(3);
  std::vector<std::array<double, 4>> x;
  for (int i = 0; i < 200; ++i) {
    const double a = rng.normal(), b = rng.normal();
    x.push_back({a + 0.1 * b, b, 0.5 * a, rng.normal(0.0, 0.1)});
  }
  const PcaModel m = pca_fit(x);
  for (int r = 0; r < 2; ++r) {
    double norm = 0.0;
    int arg = 0;
    for (int d = 0; d < 4; ++d) {
      norm += m.components[r][d] * m.components[r][d];
      if (std::abs(m.components[r][d]) > std::abs(m.components[r][arg])) arg = d;
    }
    CHECK(norm == Approx(1.0).epsilon(1e-8));
    CHECK(m.components[r][arg] > 0.0);
  }
  double cross = 0.0;
  for (int d = 0; d < 4; ++d) cross += m.components[0][d] * m.components[1][d];
  CHECK(std::abs(cross) < 1e-8);
}

TEST_CASE("pca needs at least 3 samples") {
  std::vector<std::array<double, 4>> x = {{0, 0, 0, 0}, {1, 1, 1, 1}};
  CHECK_THROWS_AS(pca_fit(x), std::invalid_argument);
}

TEST_CASE("knn with a single stored point always answers its label") {
  const KnnModel m = make_knn(1, {{0, 0, 0, 0}}, {Class::NOISE});
  CHECK(knn_predict(m, {5, 5, 5, 5}) == Class::NOISE);
  CHECK(knn_predict(m, {-100, 3, 2, 1}) == Class::NOISE);
}

TEST_CASE("knn query on top of a training point returns that point's label") {
  const KnnModel m = make_knn(1, {{0, 0, 0, 0}, {1, 1, 1, 1}, {2, 2, 2, 2}},
                              {Class::RELAX, Class::CLENCH, Class::NOISE});
  CHECK(knn_predict(m, {1, 1, 1, 1}) == Class::CLENCH);
  const auto p = knn_proba(m, {1, 1, 1, 1});
  CHECK(p[1] == 1.0);
}

TEST_CASE("knn 2-vs-2 vote tie goes to the smaller class code") {
  const KnnModel m = make_knn(4,
                              {{0, 0, 0, 1}, {0, 0, 0, -1}, {0, 0, 1, 0}, {0, 0, -1, 0}},
                              {Class::NOISE, Class::NOISE, Class::CLENCH, Class::CLENCH});
  CHECK(knn_predict(m, {0, 0, 0, 0}) == Class::CLENCH);  // code 1 beats code 2
}

TEST_CASE("knn distance ties keep training-set insertion order") {
  const KnnModel m = make_knn(1, {{1, 0, 0, 0}, {-1, 0, 0, 0}}, {Class::NOISE, Class::CLENCH});
  CHECK(knn_predict(m, {0, 0, 0, 0}) == Class::NOISE);
}

TEST_CASE("knn rejects k larger than the training set") {
  CHECK_THROWS_AS(make_knn(3, {{0, 0, 0, 0}}, {Class::RELAX}), std::invalid_argument);
}
