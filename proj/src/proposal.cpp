#include "dmoe/proposal.hpp"

#include <cmath>
#include <numbers>

namespace dmoe {

ProposalDistribution ProposalDistribution::from_moments(GaussianMoments moments) {
  ProposalDistribution out;
  const auto llt = repaired_cholesky(moments.cov);
  out.cholesky_factor = llt.matrixL();
  const auto d = static_cast<double>(moments.dim());
  out.log_norm_const = -0.5 * d * std::log(2.0 * std::numbers::pi) -
                       out.cholesky_factor.diagonal().array().log().sum();
  out.moments = std::move(moments);
  return out;
}

GaussianMoments update_with_observation(const GaussianMoments& prior, const MixtureSpec& spec, double y,
                                        const Eigen::Ref<const Vector>& x_row,
                                        const Eigen::Ref<const Vector>& z_row, const LaplaceOptions& laplace) {
  const Matrix W = design_matrix(spec, x_row, z_row);
  const Matrix cross = prior.cov * W.transpose();  // Sigma_gamma,rho
  const Vector rho_bar = W * prior.mean;
  const GaussianMoments prior_rho(rho_bar, W * cross);
  const RhoPosterior post = laplace_rho_posterior(spec, y, prior_rho, laplace);

  // gain = Sigma_gamma,rho Sigma_rho^-1
  const auto llt = repaired_cholesky(prior_rho.cov);
  const Matrix gain = llt.solve(cross.transpose()).transpose();
  Vector mean = prior.mean + gain * (post.mean - rho_bar);
  // Sigma_gamma - cross (S^-1 - S^-1 V S^-1) cross' = Sigma_gamma - gain (S - V) gain'
  Matrix cov = prior.cov - gain * (prior_rho.cov - post.cov) * gain.transpose();
  return {std::move(mean), std::move(cov)};
}

GaussianMoments update_with_batch(const GaussianMoments& prior, const MixtureSpec& spec, const DataBatch& batch,
                                  const LaplaceOptions& laplace) {
  GaussianMoments current = prior;
  for (Eigen::Index i = 0; i < batch.size(); ++i) {
    current = update_with_observation(current, spec, batch.y[i], batch.X.row(i).transpose(),
                                      batch.Z.row(i).transpose(), laplace);
  }
  return current;
}

ProposalDistribution build_proposal(const ParticleSet& particles, const Matrix& U, const DataBatch& batch,
                                    const MixtureSpec& spec, const ProposalOptions& options) {
  if (batch.empty()) throw InvalidInput("proposal needs a nonempty batch");
  if (particles.dim() != spec.dim()) throw InvalidInput("particle dimension does not match the mixture spec");
  return build_proposal(empirical_prior_moments(particles, U), batch, spec, options);
}

ProposalDistribution build_proposal(const GaussianMoments& prior, const DataBatch& batch, const MixtureSpec& spec,
                                    const ProposalOptions& options) {
  if (batch.empty()) throw InvalidInput("proposal needs a nonempty batch");
  if (prior.dim() != spec.dim()) throw InvalidInput("prior dimension does not match the mixture spec");
  if (!(options.scale >= 1.0)) throw InvalidInput("proposal scale must be at least 1");
  batch.validate(spec.beta_size(), spec.theta_size());
  GaussianMoments moments = update_with_batch(prior, spec, batch, options.laplace);
  if (options.scale != 1.0) moments.cov *= options.scale;
  return ProposalDistribution::from_moments(std::move(moments));
}

Matrix sample(const ProposalDistribution& proposal, Rng& rng, Eigen::Index count) {
  if (count < 1) throw InvalidInput("sample count must be positive");
  Matrix noise(proposal.dim(), count);
  fill_standard_normal(rng, Eigen::Map<Vector>(noise.data(), noise.size()));
  Matrix draws = proposal.cholesky_factor.triangularView<Eigen::Lower>() * noise;
  draws.colwise() += proposal.moments.mean;
  return draws;
}

double log_density(const ProposalDistribution& proposal, const Vector& gamma) {
  if (gamma.size() != proposal.dim()) throw InvalidInput("point dimension does not match the proposal");
  const Vector z = proposal.cholesky_factor.triangularView<Eigen::Lower>().solve(gamma - proposal.moments.mean);
  return proposal.log_norm_const - 0.5 * z.squaredNorm();
}

}  // namespace dmoe
