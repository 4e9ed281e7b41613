#ifndef DMOE_EVALUATION_HPP
#define DMOE_EVALUATION_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dmoe/predictive.hpp"
#include "dmoe/smc.hpp"

namespace dmoe {

/// floor(J / 2), at least 1.
int default_j_star(int intervals);

/// Mean of the last j_star interval log predictive densities.
double log_predictive_score(std::span<const PredictiveRecord> records, int j_star);

/// The initial distribution gamma_0 ~ N(0, I).
GaussianMoments standard_prior(int dim);

struct FilterRun {
  std::vector<PredictiveRecord> records;
  std::vector<double> ess;
  std::vector<bool> resampled;
  /// Filtered particle sets after each interval; filled only when requested.
  std::vector<ParticleSet> trace;
};

/// Initializes from `prior` with a generator seeded by config.seed and steps
/// through every batch. Batches must be numbered 1..J in order.
FilterRun run_filter(std::span<const DataBatch> batches, const MixtureSpec& spec, const FilterConfig& config,
                     const GaussianMoments& prior, bool keep_trace = false);

/// Filter run from N(0, I).
FilterRun run_filter(std::span<const DataBatch> batches, const MixtureSpec& spec, const FilterConfig& config,
                     bool keep_trace = false);

struct ModelScore {
  int K = 1;
  double alpha = 0.0;
  double lps = 0.0;
  std::vector<PredictiveRecord> per_interval;
  std::uint64_t seed = 0;
  bool ok = true;
  std::string error;
};

/// Seed of grid cell (K, alpha); depends only on the base seed and the cell.
std::uint64_t cell_seed(std::uint64_t base_seed, int K, double alpha);

/// Fits one cell; failures are recorded in the score instead of thrown.
ModelScore score_model(std::span<const DataBatch> batches, const MixtureSpec& spec, const FilterConfig& config,
                       int j_star);

/// Runs every (K, alpha) cell with its own seed. Successful cells come first,
/// sorted by descending LPS, ties broken by smaller K then larger alpha.
/// `j_star` <= 0 selects floor(J / 2).
std::vector<ModelScore> model_selection_grid(std::span<const DataBatch> batches, std::span<const int> Ks,
                                             std::span<const double> alphas, const FilterConfig& config,
                                             const MixtureSpec& spec_template, int j_star = 0);

/// Sort order used by model_selection_grid.
void sort_scores(std::vector<ModelScore>& scores);

struct Interval {
  double low = 0.0;
  double high = 0.0;
};

/// Shortest interval holding at least `level` of the weighted sample mass.
Interval weighted_hpd(std::span<const double> values, std::span<const double> weights, double level);

/// Per-coordinate posterior summaries of one time step.
struct CoefficientSummary {
  int time_index = 0;
  Vector mean;
  Vector hpd_low;
  Vector hpd_high;
};

std::vector<CoefficientSummary> posterior_summaries(std::span<const ParticleSet> trace, double level);

}  // namespace dmoe

#endif
