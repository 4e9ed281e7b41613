#include "dmoe/predictive.hpp"

#include <cmath>

#include "dmoe/gaussian.hpp"

namespace dmoe {

PredictiveRecord predictive_density(const ParticleSet& particles, const Matrix& U, const DataBatch& batch,
                                    const MixtureSpec& spec, Rng& rng) {
  return predictive_density(particles, repaired_cholesky(U), batch, spec, rng);
}

PredictiveRecord predictive_density(const ParticleSet& particles, const Eigen::LLT<Matrix>& U_factor,
                                    const DataBatch& batch, const MixtureSpec& spec, Rng& rng) {
  PredictiveRecord record;
  record.interval_index = batch.interval_index;
  if (batch.empty()) return record;
  if (particles.size() == 0) throw InvalidInput("empty particle set");
  if (particles.dim() != spec.dim()) throw InvalidInput("particle dimension does not match the mixture spec");
  batch.validate(spec.beta_size(), spec.theta_size());

  const Eigen::Index M = particles.size();
  const Eigen::Index n = batch.size();
  Matrix noise(particles.dim(), M);
  fill_standard_normal(rng, Eigen::Map<Vector>(noise.data(), noise.size()));
  const Matrix draws = particles.particles + U_factor.matrixL() * noise;

  const Vector base = batch_log_base(spec, batch);
  Matrix per_obs(n, M);
  Vector column(n);
  for (Eigen::Index m = 0; m < M; ++m) {
    batch_log_likelihood(spec, batch, base, draws.col(m), &column);
    per_obs.col(m) = column;
  }

  // Running log sum_m w_m prod_{i' <= i} f(y_i' | gamma_m); consecutive
  // differences are the per-observation conditional predictive terms.
  Vector running = particles.weights.array().log();
  double previous = log_sum_exp(std::span<const double>(running.data(), M));
  const double start = previous;
  record.per_observation_log_pred.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    running += per_obs.row(i).transpose();
    const double current = log_sum_exp(std::span<const double>(running.data(), M));
    if (!std::isfinite(current)) {
      throw DegenerateLikelihood("predictive density of interval " + std::to_string(batch.interval_index) +
                                 " is zero for every particle");
    }
    record.per_observation_log_pred[static_cast<std::size_t>(i)] = current - previous;
    previous = current;
  }
  record.log_pred_density = previous - start;
  return record;
}

}  // namespace dmoe
