#ifndef DMOE_CLI_COMMANDS_HPP
#define DMOE_CLI_COMMANDS_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "dmoe/cli/config.hpp"
#include "dmoe/simulation.hpp"

namespace dmoe::cli {

enum ExitCode : int {
  kSuccess = 0,
  kConfigError = 2,
  kDegeneracy = 3,
  kPartialFailure = 4,
};

/// Coefficient labels in gamma order: beta<k>_<column> then theta<k>_<column>, k from 1.
std::vector<std::string> coefficient_names(const MixtureSpec& spec, const std::vector<std::string>& x_columns,
                                           const std::vector<std::string>& z_columns);

/// Filters the input with the single (K, alpha) of the config. Writes
/// predictive.csv, predictive_observations.csv, trajectories.ndjson and summary.json.
int run_fit(const RunConfig& config, std::ostream& log);

/// Scores every (K, alpha) cell. Writes scores.csv and cells/<cell>/{predictive.csv,status.json}.
int run_select(const RunConfig& config, std::ostream& log);

struct SimulateOptions {
  DgpModel dgp = DgpModel::kM1;
  std::uint64_t seed = 1;
  /// 0 writes one dataset; otherwise training/validation pairs in pair_<i>/.
  int pairs = 0;
  int intervals = 12;
  int per_interval = 100;
  std::string out = "out";
};

/// Writes data.csv (t, interval, y, x, z), latent_path.csv and a config.json
/// that ingests the data back into the simulated batches.
int run_simulate(const SimulateOptions& options, std::ostream& log);

struct StudyOptions {
  std::vector<DgpModel> dgps{DgpModel::kM1, DgpModel::kM2, DgpModel::kM3};
  int pairs = 10;
  int particles = 2000;
  std::uint64_t seed = 1;
  int jstar = 0;
  double ess_frac = 0.5;
  int workers = 1;
  std::string out = "out";

  std::string hash() const;
};

/// Replication study. Writes selections.csv, lps_differences.csv and study.ndjson.
int run_study(const StudyOptions& options, std::ostream& log);

/// Recomputes the LPS from a predictive.csv written by fit or select.
int run_summarize(const std::string& path, int jstar, std::ostream& out);

}  // namespace dmoe::cli

#endif
