#ifndef DMOE_CLI_CONFIG_HPP
#define DMOE_CLI_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "dmoe/smc.hpp"

namespace dmoe::cli {

/// Everything a run needs. Loaded from a JSON document whose keys match the
/// field names; command-line flags override individual fields.
struct RunConfig {
  std::string input;
  std::string time_column = "t";
  /// "day": numeric day index; "date": ISO-8601 calendar date (YYYY-MM-DD).
  std::string time_format = "day";
  std::string response = "y";
  std::vector<std::string> x_columns;
  std::vector<std::string> z_columns;
  /// Interval width in time units; ignored when breakpoints are given.
  double interval_days = 30.0;
  /// Interior interval boundaries, in the time column's format.
  std::vector<std::string> breakpoints;
  std::vector<std::string> log1p_columns;
  std::string family = "poisson";
  std::vector<int> Ks{1};
  std::vector<double> alphas{0.99};
  int particles = 1000;
  std::uint64_t seed = 1;
  int jstar = 0;  // 0: floor(J / 2)
  double ess_frac = 0.5;
  double proposal_scale = 1.0;
  /// "tailored" or "bootstrap".
  std::string proposal = "tailored";
  /// 1 expands the linear-predictor posterior once at the prior mean.
  int laplace_iterations = FilterConfig{}.laplace.iterations;
  double hpd_level = 0.95;
  std::string out = "out";

  /// Semantic fields only; `out` is excluded.
  nlohmann::ordered_json to_json() const;
  static RunConfig from_json(const nlohmann::json& doc);
  /// A relative `input` is resolved against the config file's directory.
  static RunConfig load(const std::filesystem::path& path);

  /// 16 hex digits of FNV-1a over the canonical JSON of to_json().
  std::string hash() const;

  FilterConfig filter_config() const;
  void validate() const;
};

std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace dmoe::cli

#endif
