#ifndef DMOE_PREDICTIVE_HPP
#define DMOE_PREDICTIVE_HPP

#include <vector>

#include "dmoe/data.hpp"
#include "dmoe/mixture.hpp"
#include "dmoe/particles.hpp"

namespace dmoe {

/// One-step-ahead predictive density of one interval.
///
/// per_observation_log_pred[i] is log p(y_i | y_1..y_{i-1} of this batch, D_{1:j-1})
/// under the same particle draws, so the terms sum to log_pred_density.
struct PredictiveRecord {
  int interval_index = 0;
  double log_pred_density = 0.0;
  std::vector<double> per_observation_log_pred;
};

/// log p(y_j | y_{1:j-1}) ~ log sum_m w_m f_j(y_j | gamma_m), gamma_m drawn once from
/// N(gamma_{j-1}^m, U). Must be called with the time-(j-1) particles.
PredictiveRecord predictive_density(const ParticleSet& particles, const Matrix& U, const DataBatch& batch,
                                    const MixtureSpec& spec, Rng& rng);

/// Same with U already factorized.
PredictiveRecord predictive_density(const ParticleSet& particles, const Eigen::LLT<Matrix>& U_factor,
                                    const DataBatch& batch, const MixtureSpec& spec, Rng& rng);

}  // namespace dmoe

#endif
