#ifndef DMOE_GAUSSIAN_HPP
#define DMOE_GAUSSIAN_HPP

#include "dmoe/common.hpp"
#include "dmoe/mixture.hpp"
#include "dmoe/particles.hpp"

namespace dmoe {

/// Mean and covariance pair. The covariance is symmetrized on construction.
struct GaussianMoments {
  Vector mean;
  Matrix cov;

  GaussianMoments() = default;
  GaussianMoments(Vector mean_in, Matrix cov_in);

  Eigen::Index dim() const noexcept { return mean.size(); }
};

/// Laplace approximation of p(rho_j | D_{1:j}).
struct RhoPosterior {
  Vector mean;
  Matrix cov;
};

Matrix symmetrize(const Matrix& A);

/// Cholesky factor of A after the repair policy:
///   1. symmetrize (A + A') / 2;
///   2. add eps * I, eps = 1e-10 doubling while eps <= 1e-6;
///   3. otherwise clip the eigenvalues to at least max(1e-10, 1e-13 * max |eigenvalue|).
/// Throws NumericalSingularity when A has non-finite entries.
Eigen::LLT<Matrix> repaired_cholesky(const Matrix& A);

/// Inverse of a symmetric positive definite matrix through the repaired factor.
Matrix spd_inverse(const Matrix& A);

/// Gaussian approximation of the time-j prior from the time-(j-1) particles:
/// mean = sum_m w_m gamma_m, cov = U + sum_m w_m (gamma_m - mean)(gamma_m - mean)'.
GaussianMoments empirical_prior_moments(const ParticleSet& particles, const Matrix& U);

/// Moments of gamma | W gamma = rho under a Gaussian prior.
GaussianMoments condition_on_linear(const GaussianMoments& prior, const Matrix& W, const Vector& rho);

/// Which curvature of the mixture log-likelihood to use.
enum class HessianForm {
  /// Exact Hessian of log sum_k exp(pi_k): sum_k P_k H_k plus the covariance of
  /// the component scores under the responsibilities.
  kFull,
  /// sum_k P_k H_k only. Negative semi-definite whenever every component log
  /// density is concave in eta, so the Laplace step never needs repair.
  kResponsibilityWeighted,
};

struct GradHess {
  Vector grad;
  Matrix hess;
};

/// Gradient and Hessian in rho of log sum_k exp(pi_k(y, rho)).
GradHess mixture_loglik_grad_hess(const MixtureSpec& spec, double y, const Vector& rho,
                                  HessianForm form = HessianForm::kFull);

/// Gradient and Hessian of log p(rho | D) = log sum_k exp(pi_k) - 0.5 (rho - rho_bar)' S^-1 (rho - rho_bar)
/// with S = sigma_rho.
GradHess mixture_grad_hess_rho(const MixtureSpec& spec, double y, const Vector& rho, const Vector& rho_bar,
                               const Matrix& sigma_rho, HessianForm form = HessianForm::kFull);

struct LaplaceOptions {
  /// 1 expands once at the prior mean. Larger values run up to that many
  /// damped Newton steps towards the mode and expand there.
  int iterations = 1;
  /// Relative step size at which the iteration to the mode stops.
  double tolerance = 1e-9;
  HessianForm form = HessianForm::kResponsibilityWeighted;
};

/// Second-order expansion of log p(rho | D). With one iteration the expansion
/// point is the prior mean: V = [-Hess]^-1, E = rho_bar + V grad. Otherwise E
/// is the (approximate) mode and V the inverse negative Hessian there.
RhoPosterior laplace_rho_posterior(const MixtureSpec& spec, double y, const GaussianMoments& prior_rho,
                                   const LaplaceOptions& options = {});

}  // namespace dmoe

#endif
