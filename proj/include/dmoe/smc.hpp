#ifndef DMOE_SMC_HPP
#define DMOE_SMC_HPP

#include <cstdint>
#include <vector>

#include "dmoe/data.hpp"
#include "dmoe/gaussian.hpp"
#include "dmoe/particles.hpp"
#include "dmoe/predictive.hpp"
#include "dmoe/proposal.hpp"

namespace dmoe {

enum class ProposalKind {
  /// Linear-Bayes/Laplace Gaussian N(mu_j, H_j) with marginal importance weights.
  kTailored,
  /// Ancestor draw plus transition noise; weights reduce to the likelihood.
  kBootstrap,
};

struct FilterConfig {
  int particles = 1000;
  /// Discount factor in (0, 1); U_j = (1/alpha - 1) C_{j-1}.
  double alpha = 0.99;
  /// Resample when ESS < ess_threshold_fraction * M.
  double ess_threshold_fraction = 0.5;
  std::uint64_t seed = 1;
  double proposal_scale = 1.0;
  ProposalKind proposal = ProposalKind::kTailored;
  /// Number of ancestors used in the prior-mixture numerator; 0 means all M.
  int kernel_subsample = 0;
  /// Iterating to the mode keeps the proposal on target when the prior is
  /// diffuse relative to one observation (early steps, small alpha).
  LaplaceOptions laplace{.iterations = 25};

  void validate() const;
};

/// M iid draws from the initial distribution with uniform weights, time index 0.
ParticleSet initialize(const GaussianMoments& prior, const FilterConfig& config, Rng& rng);

/// U_j = (1/alpha - 1) C_{j-1}, C the weighted particle scatter.
Matrix state_noise_covariance(const ParticleSet& particles, double alpha);

/// 1 / sum w^2 of normalized weights.
double effective_sample_size(const Vector& weights);

/// Ancestor indices of systematic resampling with the single uniform u in [0, 1).
std::vector<int> systematic_ancestors(const Vector& weights, double u);

/// Systematic resampling; weights reset to 1/M.
ParticleSet resample_systematic(const ParticleSet& particles, Rng& rng);

/// Precomputed factor of U_j for evaluating the prior mixture
/// sum_h w_h N(gamma; gamma_h, U_j) at many points.
class TransitionMixture {
 public:
  TransitionMixture(const Matrix& ancestors, const Vector& weights, const Matrix& U);

  /// log sum_h w_h N(point; ancestor_h, U) for each column of `points`.
  Vector log_density(const Matrix& points) const;
  /// Same over a subset of ancestors, rescaled by M / |subset|.
  Vector log_density(const Matrix& points, const std::vector<int>& subset) const;

  const Eigen::LLT<Matrix>& factor() const noexcept { return factor_; }

 private:
  Eigen::LLT<Matrix> factor_;
  Matrix whitened_;  // M x d, row h = (L^-1 ancestor_h)'
  Vector log_weights_;
  double log_norm_const_ = 0.0;
};

struct StepResult {
  ParticleSet particles;
  PredictiveRecord predictive;
  double ess = 0.0;  // before any resampling
  bool resampled = false;
};

/// Advances the filter by one batch: predictive density, proposal, marginal
/// importance weights, normalization and ESS-triggered systematic resampling.
StepResult step(const ParticleSet& particles, const DataBatch& batch, const FilterConfig& config,
                const MixtureSpec& spec, Rng& rng);

}  // namespace dmoe

#endif
