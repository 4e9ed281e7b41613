#ifndef DMOE_PROPOSAL_HPP
#define DMOE_PROPOSAL_HPP

#include "dmoe/data.hpp"
#include "dmoe/gaussian.hpp"

namespace dmoe {

struct ProposalOptions {
  LaplaceOptions laplace;
  /// Multiplies the proposal covariance; values above 1 widen the proposal.
  double scale = 1.0;
};

/// q(gamma_j | D_{1:j}) = N(mu_j, H_j) with a stored Cholesky factor of H_j.
struct ProposalDistribution {
  GaussianMoments moments;
  Matrix cholesky_factor;       // lower triangular, L L' = H_j after repair
  double log_norm_const = 0.0;  // -d/2 log(2 pi) - log det L

  static ProposalDistribution from_moments(GaussianMoments moments);

  Eigen::Index dim() const noexcept { return moments.dim(); }
};

/// One observation of the update: condition the coefficient prior on the
/// observation's linear predictors, Laplace-approximate rho | y and carry the
/// moments back through iterated expectations and total variance.
GaussianMoments update_with_observation(const GaussianMoments& prior, const MixtureSpec& spec, double y,
                                        const Eigen::Ref<const Vector>& x_row,
                                        const Eigen::Ref<const Vector>& z_row, const LaplaceOptions& laplace = {});

/// Runs update_with_observation over the batch in stored order.
GaussianMoments update_with_batch(const GaussianMoments& prior, const MixtureSpec& spec, const DataBatch& batch,
                                  const LaplaceOptions& laplace = {});

ProposalDistribution build_proposal(const ParticleSet& particles, const Matrix& U, const DataBatch& batch,
                                    const MixtureSpec& spec, const ProposalOptions& options = {});

/// Same from explicit prior moments N(gamma_bar_j, Sigma_gamma_j).
ProposalDistribution build_proposal(const GaussianMoments& prior, const DataBatch& batch, const MixtureSpec& spec,
                                    const ProposalOptions& options = {});

/// `count` independent draws, one per column.
Matrix sample(const ProposalDistribution& proposal, Rng& rng, Eigen::Index count);

double log_density(const ProposalDistribution& proposal, const Vector& gamma);

}  // namespace dmoe

#endif
