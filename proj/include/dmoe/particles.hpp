#ifndef DMOE_PARTICLES_HPP
#define DMOE_PARTICLES_HPP

#include "dmoe/common.hpp"

namespace dmoe {

/// Weighted coefficient vectors approximating p(gamma_j | D_{1:j}).
/// One particle per column of `particles`.
struct ParticleSet {
  Matrix particles;     // d x M
  Vector log_weights;   // M, unnormalized
  Vector weights;       // M, normalized
  int time_index = 0;
  /// Set by initialize when the particles are iid draws from a Gaussian: the
  /// next step then uses N(source_mean, source_cov) itself as the time j-1
  /// posterior instead of the particle mixture.
  Vector source_mean;
  Matrix source_cov;

  bool has_gaussian_source() const noexcept { return source_cov.size() > 0; }

  Eigen::Index size() const noexcept { return particles.cols(); }
  Eigen::Index dim() const noexcept { return particles.rows(); }

  /// Uniform weights 1/M.
  void reset_weights();
  /// Recompute `weights` from `log_weights`; returns false if all are -inf or NaN.
  bool normalize();
};

/// Weighted mean of the particle columns.
Vector weighted_mean(const Matrix& particles, const Vector& weights);

/// Weighted scatter sum_m w_m (g_m - mean)(g_m - mean)'.
Matrix weighted_covariance(const Matrix& particles, const Vector& weights, const Vector& mean);

}  // namespace dmoe

#endif
