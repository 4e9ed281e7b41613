#include "dmoe/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace dmoe {

int default_j_star(int intervals) { return std::max(1, intervals / 2); }

double log_predictive_score(std::span<const PredictiveRecord> records, int j_star) {
  if (records.empty()) throw InvalidInput("no predictive records");
  if (j_star < 1 || static_cast<std::size_t>(j_star) > records.size()) {
    throw InvalidInput("J* must lie in [1, number of intervals]");
  }
  double sum = 0.0;
  for (std::size_t j = records.size() - static_cast<std::size_t>(j_star); j < records.size(); ++j) {
    sum += records[j].log_pred_density;
  }
  return sum / j_star;
}

GaussianMoments standard_prior(int dim) { return {Vector::Zero(dim), Matrix::Identity(dim, dim)}; }

FilterRun run_filter(std::span<const DataBatch> batches, const MixtureSpec& spec, const FilterConfig& config,
                     const GaussianMoments& prior, bool keep_trace) {
  spec.validate();
  config.validate();
  if (prior.dim() != spec.dim()) throw InvalidInput("initial distribution does not match the mixture spec");
  Rng rng(config.seed);
  ParticleSet particles = initialize(prior, config, rng);
  FilterRun run;
  run.records.reserve(batches.size());
  for (const DataBatch& batch : batches) {
    StepResult result = step(particles, batch, config, spec, rng);
    run.records.push_back(std::move(result.predictive));
    run.ess.push_back(result.ess);
    run.resampled.push_back(result.resampled);
    particles = std::move(result.particles);
    if (keep_trace) run.trace.push_back(particles);
  }
  return run;
}

FilterRun run_filter(std::span<const DataBatch> batches, const MixtureSpec& spec, const FilterConfig& config,
                     bool keep_trace) {
  return run_filter(batches, spec, config, standard_prior(spec.dim()), keep_trace);
}

std::uint64_t cell_seed(std::uint64_t base_seed, int K, double alpha) {
  return derive_seed(derive_seed(base_seed, static_cast<std::uint64_t>(K)), double_bits(alpha));
}

ModelScore score_model(std::span<const DataBatch> batches, const MixtureSpec& spec, const FilterConfig& config,
                       int j_star) {
  ModelScore score;
  score.K = spec.K;
  score.alpha = config.alpha;
  score.seed = config.seed;
  try {
    FilterRun run = run_filter(batches, spec, config);
    const int js = j_star > 0 ? j_star : default_j_star(static_cast<int>(run.records.size()));
    score.lps = log_predictive_score(run.records, js);
    score.per_interval = std::move(run.records);
  } catch (const Error& e) {
    score.ok = false;
    score.error = e.what();
    score.lps = -INFINITY;
  }
  return score;
}

void sort_scores(std::vector<ModelScore>& scores) {
  std::stable_sort(scores.begin(), scores.end(), [](const ModelScore& a, const ModelScore& b) {
    if (a.ok != b.ok) return a.ok;
    if (a.lps != b.lps) return a.lps > b.lps;
    if (a.K != b.K) return a.K < b.K;
    return a.alpha > b.alpha;
  });
}

std::vector<ModelScore> model_selection_grid(std::span<const DataBatch> batches, std::span<const int> Ks,
                                             std::span<const double> alphas, const FilterConfig& config,
                                             const MixtureSpec& spec_template, int j_star) {
  if (Ks.empty() || alphas.empty()) throw InvalidInput("model grid must have at least one K and one alpha");
  if (batches.empty()) throw InvalidInput("no data batches");
  std::vector<ModelScore> scores;
  for (int K : Ks) {
    MixtureSpec spec = spec_template;
    spec.K = K;
    spec.validate();
    for (double alpha : alphas) {
      FilterConfig cell = config;
      cell.alpha = alpha;
      cell.seed = cell_seed(config.seed, K, alpha);
      cell.validate();
      scores.push_back(score_model(batches, spec, cell, j_star));
    }
  }
  sort_scores(scores);
  return scores;
}

Interval weighted_hpd(std::span<const double> values, std::span<const double> weights, double level) {
  if (!(level > 0.0 && level < 1.0)) throw InvalidInput("HPD level must lie in (0, 1)");
  if (values.size() != weights.size() || values.empty()) throw InvalidInput("HPD needs matching nonempty inputs");
  std::vector<std::size_t> order;
  order.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i)
    if (weights[i] > 0.0) order.push_back(i);
  if (order.empty()) throw InvalidInput("HPD weights are all zero");
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

  const std::size_t n = order.size();
  std::vector<double> cumulative(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) cumulative[i + 1] = cumulative[i] + weights[order[i]];
  const double target = level * cumulative[n] * (1.0 - 1e-12);

  Interval best{values[order.front()], values[order.back()]};
  std::size_t right = 0;
  for (std::size_t left = 0; left < n; ++left) {
    right = std::max(right, left);
    while (right < n && cumulative[right + 1] - cumulative[left] < target) ++right;
    if (right == n) break;
    const double low = values[order[left]];
    const double high = values[order[right]];
    if (high - low < best.high - best.low) best = {low, high};
  }
  return best;
}

std::vector<CoefficientSummary> posterior_summaries(std::span<const ParticleSet> trace, double level) {
  if (!(level > 0.0 && level < 1.0)) throw InvalidInput("HPD level must lie in (0, 1)");
  std::vector<CoefficientSummary> out;
  out.reserve(trace.size());
  for (const ParticleSet& set : trace) {
    CoefficientSummary summary;
    summary.time_index = set.time_index;
    summary.mean = weighted_mean(set.particles, set.weights);
    summary.hpd_low.resize(set.dim());
    summary.hpd_high.resize(set.dim());
    std::vector<double> values(static_cast<std::size_t>(set.size()));
    for (Eigen::Index c = 0; c < set.dim(); ++c) {
      for (Eigen::Index m = 0; m < set.size(); ++m) values[static_cast<std::size_t>(m)] = set.particles(c, m);
      const Interval hpd =
          weighted_hpd(values, std::span<const double>(set.weights.data(), set.weights.size()), level);
      summary.hpd_low[c] = hpd.low;
      summary.hpd_high[c] = hpd.high;
    }
    out.push_back(std::move(summary));
  }
  return out;
}

}  // namespace dmoe
