#ifndef DMOE_TESTS_FIXTURES_HPP
#define DMOE_TESTS_FIXTURES_HPP

#include <cmath>
#include <functional>
#include <memory>
#include <numbers>

#include "dmoe/mixture.hpp"

namespace dmoe::testing {

// Normal responses with identity link and known standard deviation. The
// Laplace step is exact for it, so filters built on it have Kalman oracles.
class GaussianComponent final : public ComponentDensity {
 public:
  explicit GaussianComponent(double sigma = 1.0) : sigma_(sigma) {}

  std::string name() const override { return "gaussian"; }
  bool admissible(double y) const override { return std::isfinite(y); }
  double log_base(double y) const override {
    return -0.5 * std::log(2.0 * std::numbers::pi * sigma_ * sigma_) - 0.5 * y * y / (sigma_ * sigma_);
  }
  double log_kernel(double y, double eta) const override { return (y * eta - 0.5 * eta * eta) / (sigma_ * sigma_); }
  ScalarDerivatives kernel_derivatives(double y, double eta) const override {
    const double s2 = sigma_ * sigma_;
    return {log_kernel(y, eta), (y - eta) / s2, -1.0 / s2};
  }
  double mean_parameter(double eta) const override { return eta; }
  double sample(double eta, Rng& rng) const override {
    return std::normal_distribution<double>(eta, sigma_)(rng);
  }
  double sigma() const { return sigma_; }

 private:
  double sigma_;
};

// Likelihood identically one.
class FlatComponent final : public ComponentDensity {
 public:
  std::string name() const override { return "flat"; }
  bool admissible(double) const override { return true; }
  double log_base(double) const override { return 0.0; }
  double log_kernel(double, double) const override { return 0.0; }
  ScalarDerivatives kernel_derivatives(double, double) const override { return {}; }
  double mean_parameter(double eta) const override { return eta; }
  double sample(double eta, Rng&) const override { return eta; }
};

inline Vector random_vector(Rng& rng, Eigen::Index n, double scale = 1.0) {
  Vector v(n);
  fill_standard_normal(rng, v);
  return scale * v;
}

// Random SPD matrix with eigenvalues in roughly [floor, floor + scale * n].
inline Matrix random_spd(Rng& rng, Eigen::Index n, double scale = 1.0, double floor = 0.1) {
  Matrix A(n, n);
  fill_standard_normal(rng, Eigen::Map<Vector>(A.data(), A.size()));
  Matrix S = scale * A * A.transpose() / static_cast<double>(n);
  S.diagonal().array() += floor;
  return 0.5 * (S + S.transpose());
}

inline double relative_error(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

// Central differences of a scalar function.
inline Vector fd_gradient(const std::function<double(const Vector&)>& f, const Vector& x, double h = 1e-5) {
  Vector g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Vector a = x;
    Vector b = x;
    a[i] += h;
    b[i] -= h;
    g[i] = (f(a) - f(b)) / (2.0 * h);
  }
  return g;
}

inline Matrix fd_jacobian(const std::function<Vector(const Vector&)>& f, const Vector& x, double h = 1e-5) {
  const Eigen::Index m = f(x).size();
  Matrix J(m, x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Vector a = x;
    Vector b = x;
    a[i] += h;
    b[i] -= h;
    J.col(i) = (f(a) - f(b)) / (2.0 * h);
  }
  return J;
}

struct KalmanState {
  Vector mean;
  Matrix cov;
};

// Measurement update for y = X beta + N(0, sigma^2 I).
inline KalmanState kalman_update(const KalmanState& prior, const Matrix& X, const Vector& y, double sigma) {
  const Matrix S = X * prior.cov * X.transpose() + sigma * sigma * Matrix::Identity(X.rows(), X.rows());
  const Matrix gain = prior.cov * X.transpose() * S.ldlt().solve(Matrix::Identity(S.rows(), S.cols()));
  KalmanState post;
  post.mean = prior.mean + gain * (y - X * prior.mean);
  post.cov = prior.cov - gain * X * prior.cov;
  post.cov = 0.5 * (post.cov + post.cov.transpose());
  return post;
}

// log N(y; X m, X P X' + sigma^2 I)
inline double kalman_log_predictive(const KalmanState& predicted, const Matrix& X, const Vector& y, double sigma) {
  const Matrix S = X * predicted.cov * X.transpose() + sigma * sigma * Matrix::Identity(X.rows(), X.rows());
  const Eigen::LLT<Matrix> llt(S);
  const Vector r = y - X * predicted.mean;
  const Vector z = llt.matrixL().solve(r);
  const double logdet = 2.0 * Matrix(llt.matrixL()).diagonal().array().log().sum();
  return -0.5 * (static_cast<double>(y.size()) * std::log(2.0 * std::numbers::pi) + logdet + z.squaredNorm());
}

inline std::shared_ptr<const ComponentDensity> gaussian_family(double sigma = 1.0) {
  return std::make_shared<GaussianComponent>(sigma);
}

}  // namespace dmoe::testing

#endif
