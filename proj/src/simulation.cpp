#include "dmoe/simulation.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <future>

namespace dmoe {

namespace {

constexpr std::uint64_t kPathTag = 0x70617468;
constexpr std::uint64_t kGridTag = 0x67726964;
constexpr std::uint64_t kValidationTag = 0x76616c;

Eigen::Vector2d random_walk_step(const Eigen::Vector2d& from, const Eigen::Vector2d& variances, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::Vector2d out = from;
  for (int i = 0; i < 2; ++i) out[i] += std::sqrt(variances[i]) * normal(rng);
  return out;
}

double logistic(double v) { return 1.0 / (1.0 + std::exp(-v)); }

}  // namespace

std::string to_string(DgpModel model) {
  switch (model) {
    case DgpModel::kM1: return "m1";
    case DgpModel::kM2: return "m2";
    case DgpModel::kM3: return "m3";
  }
  return "unknown";
}

DgpModel parse_dgp(const std::string& name) {
  std::string lower = name;
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "m1") return DgpModel::kM1;
  if (lower == "m2") return DgpModel::kM2;
  if (lower == "m3") return DgpModel::kM3;
  throw InvalidInput("unknown data generating process '" + name + "' (expected m1, m2 or m3)");
}

void DgpSpec::validate() const {
  if (intervals < 1 || per_interval < 1) throw InvalidInput("simulation needs at least one interval and observation");
  if (interval_days < 1) throw InvalidInput("interval width in days must be positive");
  for (const auto* v : {&Q, &U1, &U2, &V}) {
    if ((v->array() < 0.0).any()) throw InvalidInput("random-walk variances must be nonnegative");
  }
}

std::size_t SimulatedDataset::observation_count() const {
  std::size_t n = 0;
  for (const auto& b : batches) n += static_cast<std::size_t>(b.size());
  return n;
}

LatentPath simulate_path(const DgpSpec& spec, Rng& rng) {
  spec.validate();
  LatentPath path;
  const int J = spec.intervals;
  switch (spec.model) {
    case DgpModel::kM1: {
      path.names = {"phi_0", "phi_1"};
      path.values.resize(J, 2);
      for (int j = 0; j < J; ++j) path.values.row(j) = spec.phi.transpose();
      break;
    }
    case DgpModel::kM2: {
      path.names = {"vartheta_0", "vartheta_1"};
      path.values.resize(J, 2);
      Eigen::Vector2d current = spec.vartheta0;
      for (int j = 0; j < J; ++j) {
        current = random_walk_step(current, spec.Q, rng);
        path.values.row(j) = current.transpose();
      }
      break;
    }
    case DgpModel::kM3: {
      path.names = {"beta1_0", "beta1_1", "beta2_0", "beta2_1", "theta_0", "theta_1"};
      path.values.resize(J, 6);
      Eigen::Vector2d b1 = spec.beta1_0;
      Eigen::Vector2d b2 = spec.beta2_0;
      Eigen::Vector2d th = spec.theta0;
      for (int j = 0; j < J; ++j) {
        b1 = random_walk_step(b1, spec.U1, rng);
        b2 = random_walk_step(b2, spec.U2, rng);
        th = random_walk_step(th, spec.V, rng);
        path.values.row(j) << b1.transpose(), b2.transpose(), th.transpose();
      }
      break;
    }
  }
  return path;
}

SimulatedDataset simulate_from_path(const DgpSpec& spec, const LatentPath& path, Rng& rng) {
  spec.validate();
  if (path.values.rows() != spec.intervals) throw InvalidInput("latent path length does not match the interval count");
  const PoissonComponent poisson;
  std::uniform_real_distribution<double> covariate(-1.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int n = spec.per_interval;

  SimulatedDataset data;
  data.path = path;
  for (int j = 0; j < spec.intervals; ++j) {
    DataBatch batch;
    batch.interval_index = j + 1;
    batch.y.resize(n);
    batch.X.resize(n, 2);
    batch.Z.resize(n, 2);
    std::vector<int> days(static_cast<std::size_t>(n));
    const auto row = path.values.row(j);
    for (int i = 0; i < n; ++i) {
      const double x = covariate(rng);
      const double z = covariate(rng);
      double eta = 0.0;
      if (spec.model == DgpModel::kM3) {
        const double second = logistic(row[4] + row[5] * z);
        const bool from_second = unit(rng) < second;
        eta = from_second ? row[2] + row[3] * x : row[0] + row[1] * x;
      } else {
        eta = row[0] + row[1] * x;
      }
      batch.y[i] = poisson.sample(eta, rng);
      batch.X.row(i) << 1.0, x;
      batch.Z.row(i) << 1.0, z;
      days[static_cast<std::size_t>(i)] = j * spec.interval_days + (i * spec.interval_days) / n;
    }
    data.batches.push_back(std::move(batch));
    data.days.push_back(std::move(days));
  }
  return data;
}

SimulatedDataset simulate(const DgpSpec& spec) {
  Rng path_rng(derive_seed(spec.seed, kPathTag));
  const LatentPath path = simulate_path(spec, path_rng);
  Rng data_rng(derive_seed(spec.seed, 1));
  SimulatedDataset data = simulate_from_path(spec, path, data_rng);
  data.pair_id = "training";
  return data;
}

SimulatedPair simulate_pair(const DgpSpec& spec) {
  SimulatedPair pair;
  pair.training = simulate(spec);
  Rng data_rng(derive_seed(spec.seed, 2));
  pair.validation = simulate_from_path(spec, pair.training.path, data_rng);
  pair.validation.pair_id = "validation";
  return pair;
}

MixtureSpec simulation_model(int K) { return make_spec(K, make_component("poisson"), {0}, {1}); }

int StudyReport::selection_count(DgpModel dgp, int K, double alpha) const {
  return static_cast<int>(std::count_if(outcomes.begin(), outcomes.end(), [&](const PairOutcome& o) {
    return o.ok && o.dgp == dgp && o.selected_K == K && o.selected_alpha == alpha;
  }));
}

std::vector<const PairOutcome*> StudyReport::for_dgp(DgpModel dgp) const {
  std::vector<const PairOutcome*> out;
  for (const auto& o : outcomes)
    if (o.dgp == dgp) out.push_back(&o);
  return out;
}

std::uint64_t pair_seed(std::uint64_t base_seed, DgpModel dgp, int pair) {
  return derive_seed(derive_seed(base_seed, static_cast<std::uint64_t>(dgp) + 1), static_cast<std::uint64_t>(pair));
}

PairOutcome run_pair(DgpModel dgp, int pair, const StudyConfig& config) {
  PairOutcome outcome;
  outcome.dgp = dgp;
  outcome.pair = pair;
  const std::uint64_t seed = pair_seed(config.filter.seed, dgp, pair);

  DgpSpec dgp_spec;
  dgp_spec.model = dgp;
  dgp_spec.intervals = config.intervals;
  dgp_spec.per_interval = config.per_interval;
  dgp_spec.seed = seed;
  const SimulatedPair data = simulate_pair(dgp_spec);

  FilterConfig grid_config = config.filter;
  grid_config.seed = derive_seed(seed, kGridTag);
  outcome.grid = model_selection_grid(data.training.batches, config.Ks, config.alphas, grid_config,
                                      simulation_model(1), config.j_star);
  outcome.failed_cells =
      static_cast<int>(std::count_if(outcome.grid.begin(), outcome.grid.end(), [](const auto& s) { return !s.ok; }));
  const ModelScore& best = outcome.grid.front();
  if (!best.ok) {
    outcome.ok = false;
    outcome.error = "every grid cell failed: " + best.error;
    return outcome;
  }
  outcome.selected_K = best.K;
  outcome.selected_alpha = best.alpha;
  outcome.training_lps = best.lps;

  const std::uint64_t validation_base = derive_seed(seed, kValidationTag);
  const MixtureSpec spec = simulation_model(best.K);
  auto validate_at = [&](double alpha) {
    FilterConfig cell = config.filter;
    cell.alpha = alpha;
    cell.seed = cell_seed(validation_base, best.K, alpha);
    return score_model(data.validation.batches, spec, cell, config.j_star);
  };
  const ModelScore selected = validate_at(best.alpha);
  const ModelScore fixed = validate_at(config.static_alpha);
  if (!selected.ok || !fixed.ok) {
    outcome.ok = false;
    outcome.error = "validation run failed: " + (selected.ok ? fixed.error : selected.error);
    return outcome;
  }
  outcome.validation_lps_selected = selected.lps;
  outcome.validation_lps_static = fixed.lps;
  return outcome;
}

StudyReport run_replication_study(const StudyConfig& config, const std::function<void(const PairOutcome&)>& on_pair) {
  if (config.pairs < 1) throw InvalidInput("study needs at least one pair");
  if (config.dgps.empty()) throw InvalidInput("study needs at least one data generating process");
  config.filter.validate();

  std::vector<std::pair<DgpModel, int>> jobs;
  for (DgpModel dgp : config.dgps)
    for (int p = 0; p < config.pairs; ++p) jobs.emplace_back(dgp, p);

  StudyReport report;
  report.outcomes.resize(jobs.size());
  const std::size_t workers = static_cast<std::size_t>(std::max(1, config.workers));
  for (std::size_t start = 0; start < jobs.size(); start += workers) {
    const std::size_t stop = std::min(jobs.size(), start + workers);
    std::vector<std::future<PairOutcome>> running;
    for (std::size_t i = start; i < stop; ++i) {
      running.push_back(std::async(workers > 1 ? std::launch::async : std::launch::deferred,
                                   [&, i] { return run_pair(jobs[i].first, jobs[i].second, config); }));
    }
    for (std::size_t i = start; i < stop; ++i) {
      report.outcomes[i] = running[i - start].get();
      if (on_pair) on_pair(report.outcomes[i]);
    }
  }
  return report;
}

}  // namespace dmoe
