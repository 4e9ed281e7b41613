#include "dmoe/smc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>

namespace dmoe {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

Vector log_of(const Vector& weights) { return weights.array().log(); }

// log sum_h exp(log_w_h - 0.5 |a_h - b|^2) over rows h of `whitened`
double whitened_log_sum(const Matrix& whitened, const Vector& log_w, const double* b, const int* subset,
                        Eigen::Index count, std::vector<double>& scratch) {
  const Eigen::Index d = whitened.cols();
  scratch.assign(static_cast<std::size_t>(count), 0.0);
  double* acc = scratch.data();
  for (Eigen::Index k = 0; k < d; ++k) {
    const double* col = whitened.col(k).data();
    const double bk = b[k];
    if (subset) {
      for (Eigen::Index h = 0; h < count; ++h) {
        const double diff = col[subset[h]] - bk;
        acc[h] += diff * diff;
      }
    } else {
      for (Eigen::Index h = 0; h < count; ++h) {
        const double diff = col[h] - bk;
        acc[h] += diff * diff;
      }
    }
  }
  Eigen::Map<Eigen::ArrayXd> terms(acc, count);
  if (subset) {
    for (Eigen::Index h = 0; h < count; ++h) terms[h] = log_w[subset[h]] - 0.5 * terms[h];
  } else {
    terms = log_w.array() - 0.5 * terms;
  }
  const double max_term = terms.maxCoeff();
  if (!std::isfinite(max_term)) return max_term;
  // vectorized exp; terms below max - 745 underflow to zero
  const double sum = (terms - max_term).exp().sum();
  return max_term + std::log(sum);
}

}  // namespace

void FilterConfig::validate() const {
  if (particles < 1) throw InvalidInput("particle count must be at least 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidInput("discount factor must lie in (0, 1)");
  if (!(ess_threshold_fraction > 0.0 && ess_threshold_fraction <= 1.0)) {
    throw InvalidInput("ESS threshold fraction must lie in (0, 1]");
  }
  if (!(proposal_scale >= 1.0)) throw InvalidInput("proposal scale must be at least 1");
  if (kernel_subsample < 0) throw InvalidInput("kernel subsample size must be nonnegative");
  if (laplace.iterations < 1) throw InvalidInput("Laplace iterations must be at least 1");
}

ParticleSet initialize(const GaussianMoments& prior, const FilterConfig& config, Rng& rng) {
  config.validate();
  const auto llt = repaired_cholesky(prior.cov);
  Matrix noise(prior.dim(), config.particles);
  fill_standard_normal(rng, Eigen::Map<Vector>(noise.data(), noise.size()));
  ParticleSet out;
  out.particles = llt.matrixL() * noise;
  out.particles.colwise() += prior.mean;
  out.reset_weights();
  out.time_index = 0;
  out.source_mean = prior.mean;
  out.source_cov = prior.cov;
  return out;
}

Matrix state_noise_covariance(const ParticleSet& particles, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidInput("discount factor must lie in (0, 1)");
  const Vector mean = weighted_mean(particles.particles, particles.weights);
  return (1.0 / alpha - 1.0) * weighted_covariance(particles.particles, particles.weights, mean);
}

double effective_sample_size(const Vector& weights) {
  if (weights.size() == 0) throw InvalidInput("empty weight vector");
  return 1.0 / weights.squaredNorm();
}

std::vector<int> systematic_ancestors(const Vector& weights, double u) {
  const auto M = static_cast<int>(weights.size());
  if (M == 0) throw InvalidInput("empty weight vector");
  if (!(u >= 0.0 && u < 1.0)) throw InvalidInput("systematic offset must lie in [0, 1)");
  std::vector<int> ancestors(static_cast<std::size_t>(M));
  double cumulative = weights[0];
  int source = 0;
  for (int m = 0; m < M; ++m) {
    const double point = (static_cast<double>(m) + u) / M;
    while (point >= cumulative && source < M - 1) cumulative += weights[++source];
    ancestors[static_cast<std::size_t>(m)] = source;
  }
  return ancestors;
}

ParticleSet resample_systematic(const ParticleSet& particles, Rng& rng) {
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const auto ancestors = systematic_ancestors(particles.weights, uniform(rng));
  ParticleSet out;
  out.particles.resize(particles.dim(), particles.size());
  for (std::size_t m = 0; m < ancestors.size(); ++m) {
    out.particles.col(static_cast<Eigen::Index>(m)) = particles.particles.col(ancestors[m]);
  }
  out.time_index = particles.time_index;
  out.reset_weights();
  return out;
}

TransitionMixture::TransitionMixture(const Matrix& ancestors, const Vector& weights, const Matrix& U)
    : factor_(repaired_cholesky(U)) {
  if (ancestors.cols() != weights.size()) throw InvalidInput("weight count does not match ancestor count");
  whitened_ = factor_.matrixL().solve(ancestors).transpose();
  log_weights_ = log_of(weights);
  const auto d = static_cast<double>(U.rows());
  log_norm_const_ = -0.5 * d * std::log(2.0 * std::numbers::pi) -
                    Matrix(factor_.matrixL()).diagonal().array().log().sum();
}

Vector TransitionMixture::log_density(const Matrix& points) const {
  const Matrix b = factor_.matrixL().solve(points);
  Vector out(points.cols());
  std::vector<double> scratch;
  for (Eigen::Index m = 0; m < points.cols(); ++m) {
    out[m] = whitened_log_sum(whitened_, log_weights_, b.col(m).data(), nullptr, whitened_.rows(), scratch) +
             log_norm_const_;
  }
  return out;
}

Vector TransitionMixture::log_density(const Matrix& points, const std::vector<int>& subset) const {
  if (subset.empty()) throw InvalidInput("empty ancestor subset");
  const Matrix b = factor_.matrixL().solve(points);
  const double rescale = std::log(static_cast<double>(whitened_.rows()) / static_cast<double>(subset.size()));
  Vector out(points.cols());
  std::vector<double> scratch;
  const auto count = static_cast<Eigen::Index>(subset.size());
  for (Eigen::Index m = 0; m < points.cols(); ++m) {
    out[m] = whitened_log_sum(whitened_, log_weights_, b.col(m).data(), subset.data(), count, scratch) +
             log_norm_const_ + rescale;
  }
  return out;
}

StepResult step(const ParticleSet& particles, const DataBatch& batch, const FilterConfig& config,
                const MixtureSpec& spec, Rng& rng) {
  config.validate();
  if (batch.interval_index != particles.time_index + 1) {
    throw InvalidInput("batch interval " + std::to_string(batch.interval_index) +
                       " does not follow particle time index " + std::to_string(particles.time_index));
  }
  if (particles.dim() != spec.dim()) throw InvalidInput("particle dimension does not match the mixture spec");
  if (!batch.empty()) {
    batch.validate(spec.beta_size(), spec.theta_size());
    check_admissible(spec, batch);
  }

  const Eigen::Index M = particles.size();
  // From a Gaussian source the scatter and the prior mixture have closed forms:
  // C_0 = Sigma_0 and p(gamma_1) = N(mu_0, Sigma_0 / alpha).
  const bool exact_source = particles.has_gaussian_source();
  const Matrix U = exact_source ? Matrix((1.0 / config.alpha - 1.0) * particles.source_cov)
                                : state_noise_covariance(particles, config.alpha);
  const TransitionMixture prior_mixture(particles.particles, particles.weights, U);

  StepResult result;
  try {
    result.predictive = predictive_density(particles, prior_mixture.factor(), batch, spec, rng);
  } catch (const DegenerateLikelihood& e) {
    throw FilterDegeneracy(batch.interval_index, e.what());
  }

  ParticleSet next;
  next.time_index = batch.interval_index;

  if (batch.empty()) {
    // no measurement: pure diffusion under the transition density
    Matrix noise(particles.dim(), M);
    fill_standard_normal(rng, Eigen::Map<Vector>(noise.data(), noise.size()));
    next.particles = particles.particles + prior_mixture.factor().matrixL() * noise;
    next.log_weights = particles.log_weights;
    next.weights = particles.weights;
    if (exact_source) {
      next.source_mean = particles.source_mean;
      next.source_cov = particles.source_cov / config.alpha;
    }
    result.ess = effective_sample_size(next.weights);
    result.particles = std::move(next);
    return result;
  }

  const Vector base = batch_log_base(spec, batch);
  next.log_weights.resize(M);
  next.weights.resize(M);

  if (config.proposal == ProposalKind::kTailored) {
    ProposalOptions options;
    options.laplace = config.laplace;
    options.scale = config.proposal_scale;
    ProposalDistribution proposal;
    std::optional<ProposalDistribution> source_prior;
    try {
      // The proposal always uses the particle moments: exactly symmetric prior
      // moments would pin it to the saddle between relabelled posterior modes.
      proposal = build_proposal(particles, U, batch, spec, options);
      if (exact_source) {
        source_prior = ProposalDistribution::from_moments({particles.source_mean, particles.source_cov + U});
      }
    } catch (const NumericalSingularity& e) {
      throw FilterDegeneracy(batch.interval_index, std::string("proposal: ") + e.what());
    }
    next.particles = sample(proposal, rng, M);

    Vector log_prior(M);
    if (source_prior) {
      for (Eigen::Index m = 0; m < M; ++m) log_prior[m] = log_density(*source_prior, next.particles.col(m));
    } else if (config.kernel_subsample > 0 && config.kernel_subsample < M) {
      std::vector<int> all(static_cast<std::size_t>(M));
      std::iota(all.begin(), all.end(), 0);
      std::vector<int> subset;
      subset.reserve(static_cast<std::size_t>(config.kernel_subsample));
      std::sample(all.begin(), all.end(), std::back_inserter(subset), config.kernel_subsample, rng);
      log_prior = prior_mixture.log_density(next.particles, subset);
    } else {
      log_prior = prior_mixture.log_density(next.particles);
    }
    for (Eigen::Index m = 0; m < M; ++m) {
      const Vector gamma = next.particles.col(m);
      next.log_weights[m] =
          batch_log_likelihood(spec, batch, base, gamma) + log_prior[m] - log_density(proposal, gamma);
    }
  } else {
    std::discrete_distribution<int> pick(particles.weights.data(), particles.weights.data() + M);
    Matrix noise(particles.dim(), M);
    next.particles.resize(particles.dim(), M);
    for (Eigen::Index m = 0; m < M; ++m) next.particles.col(m) = particles.particles.col(pick(rng));
    fill_standard_normal(rng, Eigen::Map<Vector>(noise.data(), noise.size()));
    next.particles += prior_mixture.factor().matrixL() * noise;
    for (Eigen::Index m = 0; m < M; ++m) {
      next.log_weights[m] = batch_log_likelihood(spec, batch, base, next.particles.col(m));
    }
  }

  if (!next.normalize()) {
    throw FilterDegeneracy(batch.interval_index, "every importance weight is zero");
  }
  result.ess = effective_sample_size(next.weights);
  if (result.ess < config.ess_threshold_fraction * static_cast<double>(M)) {
    next = resample_systematic(next, rng);
    result.resampled = true;
  }
  result.particles = std::move(next);
  return result;
}

}  // namespace dmoe
