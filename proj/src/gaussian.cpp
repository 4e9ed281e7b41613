#include "dmoe/gaussian.hpp"

#include <algorithm>
#include <cmath>

namespace dmoe {

namespace {

constexpr double kJitterStart = 1e-10;
constexpr double kJitterMax = 1e-6;
constexpr double kEigenFloor = 1e-10;
constexpr double kRelativeEigenFloor = 1e-13;

}  // namespace

GaussianMoments::GaussianMoments(Vector mean_in, Matrix cov_in) : mean(std::move(mean_in)), cov(std::move(cov_in)) {
  if (cov.rows() != mean.size() || cov.cols() != mean.size()) {
    throw InvalidInput("covariance dimensions do not match the mean");
  }
  cov = symmetrize(cov);
}

Matrix symmetrize(const Matrix& A) { return 0.5 * (A + A.transpose()); }

Eigen::LLT<Matrix> repaired_cholesky(const Matrix& A) {
  if (A.rows() != A.cols()) throw InvalidInput("matrix to factorize is not square");
  const Matrix S = symmetrize(A);
  if (!S.allFinite()) throw NumericalSingularity("matrix to factorize has non-finite entries");
  Eigen::LLT<Matrix> llt(S);
  if (llt.info() == Eigen::Success) return llt;
  const Matrix I = Matrix::Identity(S.rows(), S.cols());
  for (double eps = kJitterStart; eps <= kJitterMax; eps *= 2.0) {
    llt.compute(S + eps * I);
    if (llt.info() == Eigen::Success) return llt;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(S);
  if (eig.info() != Eigen::Success) throw NumericalSingularity("eigendecomposition failed during repair");
  // a floor relative to the spectrum keeps badly scaled matrices factorizable
  const double floor = std::max(kEigenFloor, kRelativeEigenFloor * eig.eigenvalues().cwiseAbs().maxCoeff());
  const Vector clipped = eig.eigenvalues().cwiseMax(floor);
  llt.compute(eig.eigenvectors() * clipped.asDiagonal() * eig.eigenvectors().transpose());
  if (llt.info() != Eigen::Success) throw NumericalSingularity("matrix could not be repaired to positive definite");
  return llt;
}

Matrix spd_inverse(const Matrix& A) {
  const auto llt = repaired_cholesky(A);
  return symmetrize(llt.solve(Matrix::Identity(A.rows(), A.cols())));
}

GaussianMoments empirical_prior_moments(const ParticleSet& particles, const Matrix& U) {
  if (particles.size() == 0) throw InvalidInput("empty particle set");
  if (U.rows() != particles.dim() || U.cols() != particles.dim()) {
    throw InvalidInput("state noise covariance does not match the particle dimension");
  }
  Vector mean = weighted_mean(particles.particles, particles.weights);
  Matrix cov = U + weighted_covariance(particles.particles, particles.weights, mean);
  return {std::move(mean), std::move(cov)};
}

GaussianMoments condition_on_linear(const GaussianMoments& prior, const Matrix& W, const Vector& rho) {
  if (W.cols() != prior.dim() || W.rows() != rho.size()) {
    throw InvalidInput("constraint matrix dimensions do not match");
  }
  const Matrix cross = prior.cov * W.transpose();  // Sigma_gamma,rho
  const Matrix sigma_rho = W * cross;
  const auto llt = repaired_cholesky(sigma_rho);
  const Matrix gain = llt.solve(cross.transpose()).transpose();  // cross * Sigma_rho^-1
  Vector mean = prior.mean + gain * (rho - W * prior.mean);
  Matrix cov = prior.cov - gain * cross.transpose();
  return {std::move(mean), std::move(cov)};
}

GradHess mixture_loglik_grad_hess(const MixtureSpec& spec, double y, const Vector& rho, HessianForm form) {
  const int K = spec.K;
  const int r = spec.rho_dim();
  if (rho.size() != r) throw InvalidInput("linear predictor vector must have length 2K-1");
  if (!rho.allFinite()) throw InvalidInput("linear predictor vector has non-finite entries");
  const Vector psi = rho.tail(K - 1);
  const Vector log_omega = log_gating_weights(psi);
  const Vector omega_rest = log_omega.tail(K - 1).array().exp();

  Vector pi(K);
  Vector first(K);
  Vector second(K);
  for (int k = 0; k < K; ++k) {
    const auto d = spec.family->kernel_derivatives(y, rho[k]);
    pi[k] = log_omega[k] + d.value;
    first[k] = d.first;
    second[k] = d.second;
  }
  const double norm = log_sum_exp(std::span<const double>(pi.data(), K));
  if (!std::isfinite(norm)) throw DegenerateLikelihood("every mixture term of the observation is -inf");
  const Vector resp = (pi.array() - norm).exp();

  // scores of pi_k in rho, one column per component
  Matrix scores = Matrix::Zero(r, K);
  for (int k = 0; k < K; ++k) {
    scores(k, k) = first[k];
    scores.col(k).tail(K - 1) = -omega_rest;
    if (k > 0) scores(K + k - 1, k) += 1.0;
  }

  GradHess out;
  out.grad = scores * resp;
  out.hess = Matrix::Zero(r, r);
  for (int k = 0; k < K; ++k) out.hess(k, k) = resp[k] * second[k];
  if (K > 1) {
    Matrix gate = omega_rest * omega_rest.transpose();
    gate.diagonal() -= omega_rest;
    out.hess.bottomRightCorner(K - 1, K - 1) = gate;
  }
  if (form == HessianForm::kFull) {
    out.hess += scores * resp.asDiagonal() * scores.transpose() - out.grad * out.grad.transpose();
  }
  out.hess = symmetrize(out.hess);
  return out;
}

GradHess mixture_grad_hess_rho(const MixtureSpec& spec, double y, const Vector& rho, const Vector& rho_bar,
                               const Matrix& sigma_rho, HessianForm form) {
  if (rho_bar.size() != rho.size() || sigma_rho.rows() != rho.size() || sigma_rho.cols() != rho.size()) {
    throw InvalidInput("prior moments of rho have the wrong dimension");
  }
  GradHess out = mixture_loglik_grad_hess(spec, y, rho, form);
  const auto llt = repaired_cholesky(sigma_rho);
  out.grad -= llt.solve(rho - rho_bar);
  out.hess -= symmetrize(llt.solve(Matrix::Identity(rho.size(), rho.size())));
  return out;
}

RhoPosterior laplace_rho_posterior(const MixtureSpec& spec, double y, const GaussianMoments& prior_rho,
                                   const LaplaceOptions& options) {
  if (prior_rho.dim() != spec.rho_dim()) throw InvalidInput("prior of rho must have dimension 2K-1");
  if (options.iterations < 1) throw InvalidInput("Laplace iterations must be at least 1");
  const auto prior_llt = repaired_cholesky(prior_rho.cov);
  const Matrix precision = symmetrize(prior_llt.solve(Matrix::Identity(prior_rho.dim(), prior_rho.dim())));

  Vector point = prior_rho.mean;
  auto newton = [&](const Vector& at, Vector& grad) {
    GradHess gh = mixture_loglik_grad_hess(spec, y, at, options.form);
    grad = gh.grad - precision * (at - prior_rho.mean);
    const Matrix neg_hess = precision - gh.hess;
    try {
      return repaired_cholesky(neg_hess);
    } catch (const NumericalSingularity& e) {
      throw NumericalSingularity(std::string("Laplace Hessian: ") + e.what());
    }
  };
  auto covariance = [](const Eigen::LLT<Matrix>& llt) {
    return symmetrize(llt.solve(Matrix::Identity(llt.rows(), llt.cols())));
  };

  RhoPosterior out;
  Vector grad;
  if (options.iterations == 1) {
    const auto llt = newton(point, grad);
    out.cov = covariance(llt);
    out.mean = point + out.cov * grad;
    return out;
  }

  // damped Newton ascent to the mode; moments from the expansion there
  const double log_base = spec.family->log_base(y);
  auto objective = [&](const Vector& at) {
    const Vector diff = at - prior_rho.mean;
    return mixture_log_density_stacked(spec, y, log_base, at.data()) - 0.5 * diff.dot(precision * diff);
  };
  double value = objective(point);
  for (int it = 0; it < options.iterations; ++it) {
    const auto llt = newton(point, grad);
    const Vector direction = llt.solve(grad);
    double step = 1.0;
    Vector trial = point + direction;
    double trial_value = objective(trial);
    while (!(trial_value >= value) && step > 1e-6) {
      step *= 0.5;
      trial = point + step * direction;
      trial_value = objective(trial);
    }
    if (!(trial_value >= value)) break;
    const double moved = (trial - point).lpNorm<Eigen::Infinity>();
    point = std::move(trial);
    value = trial_value;
    if (moved <= options.tolerance * (1.0 + point.lpNorm<Eigen::Infinity>())) break;
  }
  out.cov = covariance(newton(point, grad));
  out.mean = point;
  return out;
}

}  // namespace dmoe
