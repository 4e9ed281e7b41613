#ifndef DMOE_SIMULATION_HPP
#define DMOE_SIMULATION_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "dmoe/evaluation.hpp"

namespace dmoe {

/// The three data generating processes of the simulation study.
///   M1: static Poisson regression, log lambda = x' phi.
///   M2: Poisson regression with random-walk coefficients (covariance Q).
///   M3: two Poisson experts with random-walk coefficients and a logistic gate on z.
enum class DgpModel { kM1, kM2, kM3 };

std::string to_string(DgpModel model);
/// Parses "m1" / "M1" etc.
DgpModel parse_dgp(const std::string& name);

struct DgpSpec {
  DgpModel model = DgpModel::kM1;
  int intervals = 12;
  int per_interval = 100;
  /// Width of an interval on the emitted day scale.
  int interval_days = 30;
  std::uint64_t seed = 1;

  Eigen::Vector2d phi{0.11, 2.29};
  Eigen::Vector2d vartheta0{0.11, 2.29};
  Eigen::Vector2d Q{0.17, 0.2};  // diagonal
  Eigen::Vector2d beta1_0{1.1, 2.17};
  Eigen::Vector2d beta2_0{-0.8, 1.94};
  Eigen::Vector2d theta0{2.63, -4.41};
  Eigen::Vector2d U1{0.08, 0.15};
  Eigen::Vector2d U2{0.07, 0.1};
  Eigen::Vector2d V{0.08, 0.17};

  void validate() const;
};

/// Realized parameters, one row per interval.
struct LatentPath {
  std::vector<std::string> names;
  Matrix values;  // J x names.size()
};

struct SimulatedDataset {
  std::vector<DataBatch> batches;  // X = (1, x), Z = (1, z)
  std::vector<std::vector<int>> days;  // emitted time stamp of every observation
  LatentPath path;
  std::string pair_id;

  std::size_t observation_count() const;
};

struct SimulatedPair {
  SimulatedDataset training;
  SimulatedDataset validation;
};

LatentPath simulate_path(const DgpSpec& spec, Rng& rng);

/// Responses and covariates conditional on a fixed path.
SimulatedDataset simulate_from_path(const DgpSpec& spec, const LatentPath& path, Rng& rng);

/// A training dataset with its own path.
SimulatedDataset simulate(const DgpSpec& spec);

/// Training and validation datasets sharing one latent path but with
/// independent covariates and responses.
SimulatedPair simulate_pair(const DgpSpec& spec);

/// Model structure used to fit the simulated data: x in column 0, z in column 1.
MixtureSpec simulation_model(int K);

struct StudyConfig {
  std::vector<DgpModel> dgps{DgpModel::kM1, DgpModel::kM2, DgpModel::kM3};
  int pairs = 10;
  std::vector<int> Ks{1, 2, 3};
  std::vector<double> alphas{0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.99};
  double static_alpha = 0.99;
  FilterConfig filter;  // filter.seed is the study base seed
  int intervals = 12;
  int per_interval = 100;
  int j_star = 0;
  int workers = 1;
};

struct PairOutcome {
  DgpModel dgp = DgpModel::kM1;
  int pair = 0;
  bool ok = true;
  std::string error;
  int selected_K = 0;
  double selected_alpha = 0.0;
  double training_lps = 0.0;
  double validation_lps_selected = 0.0;
  double validation_lps_static = 0.0;
  int failed_cells = 0;
  std::vector<ModelScore> grid;  // training scores, sorted

  double lps_difference() const { return validation_lps_selected - validation_lps_static; }
};

struct StudyReport {
  std::vector<PairOutcome> outcomes;

  /// Times (K, alpha) won on `dgp`.
  int selection_count(DgpModel dgp, int K, double alpha) const;
  std::vector<const PairOutcome*> for_dgp(DgpModel dgp) const;
};

std::uint64_t pair_seed(std::uint64_t base_seed, DgpModel dgp, int pair);

PairOutcome run_pair(DgpModel dgp, int pair, const StudyConfig& config);

StudyReport run_replication_study(const StudyConfig& config,
                                  const std::function<void(const PairOutcome&)>& on_pair = {});

}  // namespace dmoe

#endif
