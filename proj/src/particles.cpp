#include "dmoe/particles.hpp"

#include <cmath>

namespace dmoe {

void ParticleSet::reset_weights() {
  const auto M = size();
  weights = Vector::Constant(M, 1.0 / static_cast<double>(M));
  log_weights = Vector::Constant(M, -std::log(static_cast<double>(M)));
}

bool ParticleSet::normalize() {
  for (Eigen::Index m = 0; m < log_weights.size(); ++m) {
    if (std::isnan(log_weights[m])) log_weights[m] = -INFINITY;
  }
  weights.resize(log_weights.size());
  const double norm = log_sum_exp(std::span<const double>(log_weights.data(), log_weights.size()));
  if (!std::isfinite(norm)) return false;
  for (Eigen::Index m = 0; m < log_weights.size(); ++m) {
    weights[m] = std::exp(log_weights[m] - norm);
  }
  const double total = weights.sum();
  weights /= total;
  return true;
}

Vector weighted_mean(const Matrix& particles, const Vector& weights) {
  if (particles.cols() == 0) throw InvalidInput("empty particle set");
  if (weights.size() != particles.cols()) throw InvalidInput("weight count does not match particle count");
  return particles * weights;
}

Matrix weighted_covariance(const Matrix& particles, const Vector& weights, const Vector& mean) {
  if (particles.cols() == 0) throw InvalidInput("empty particle set");
  const Matrix centered = particles.colwise() - mean;
  Matrix cov = centered * weights.asDiagonal() * centered.transpose();
  return 0.5 * (cov + cov.transpose());
}

}  // namespace dmoe
