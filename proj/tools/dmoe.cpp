#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "dmoe/cli/commands.hpp"
#include "dmoe/cli/io.hpp"

namespace {

using namespace dmoe;
using namespace dmoe::cli;

std::vector<double> parse_numbers(const std::string& text, const char* flag) {
  std::vector<double> values;
  for (const auto& item : split_list(text)) {
    double v = 0.0;
    if (!parse_double(item, v)) throw InvalidInput(std::string(flag) + ": cannot parse '" + item + "'");
    values.push_back(v);
  }
  if (values.empty()) throw InvalidInput(std::string(flag) + " needs at least one value");
  return values;
}

std::vector<int> parse_ints(const std::string& text, const char* flag) {
  std::vector<int> values;
  for (double v : parse_numbers(text, flag)) {
    if (v != std::floor(v) || std::abs(v) > 1e9) throw InvalidInput(std::string(flag) + " takes integers");
    values.push_back(static_cast<int>(v));
  }
  return values;
}

// Flags shared by fit and select. Unset flags leave the config file values alone.
struct RunFlags {
  std::string config;
  std::optional<std::string> input, time_col, time_format, response, x_cols, z_cols, breakpoints, log1p, k, alpha,
      out, proposal;
  std::optional<double> interval_days, ess_frac, proposal_scale, hpd_level;
  std::optional<int> particles, jstar, laplace_iterations;
  std::optional<std::uint64_t> seed;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config, "JSON run configuration");
    cmd->add_option("--input", input, "CSV input file");
    cmd->add_option("--time-col", time_col, "time column name (default t)");
    cmd->add_option("--time-format", time_format, "day or date (YYYY-MM-DD)");
    cmd->add_option("--response", response, "response column name (default y)");
    cmd->add_option("--x-cols", x_cols, "comma-separated component covariates");
    cmd->add_option("--z-cols", z_cols, "comma-separated gating covariates");
    cmd->add_option("--interval-days", interval_days, "interval width in time units");
    cmd->add_option("--breakpoints", breakpoints, "comma-separated interior interval boundaries");
    cmd->add_option("--log1p", log1p, "comma-separated columns to transform with log(1+x)");
    cmd->add_option("--k", k, "number of components (comma-separated list for select)");
    cmd->add_option("--alpha", alpha, "discount factor (comma-separated list for select)");
    cmd->add_option("--particles", particles, "particle count M");
    cmd->add_option("--seed", seed, "random seed");
    cmd->add_option("--jstar", jstar, "intervals in the LPS (default floor(J/2))");
    cmd->add_option("--ess-frac", ess_frac, "resample when ESS < ess-frac * M");
    cmd->add_option("--proposal", proposal, "tailored or bootstrap");
    cmd->add_option("--proposal-scale", proposal_scale, "proposal covariance inflation (>= 1)");
    cmd->add_option("--laplace-iterations", laplace_iterations, "Newton steps of the Laplace approximation");
    cmd->add_option("--hpd-level", hpd_level, "HPD interval mass");
    cmd->add_option("--out", out, "output directory");
  }

  RunConfig resolve() const {
    RunConfig c = config.empty() ? RunConfig{} : RunConfig::load(config);
    if (input) c.input = *input;
    if (time_col) c.time_column = *time_col;
    if (time_format) c.time_format = *time_format;
    if (response) c.response = *response;
    if (x_cols) c.x_columns = split_list(*x_cols);
    if (z_cols) c.z_columns = split_list(*z_cols);
    if (interval_days) c.interval_days = *interval_days;
    if (breakpoints) c.breakpoints = split_list(*breakpoints);
    if (log1p) c.log1p_columns = split_list(*log1p);
    if (k) c.Ks = parse_ints(*k, "--k");
    if (alpha) c.alphas = parse_numbers(*alpha, "--alpha");
    if (particles) c.particles = *particles;
    if (seed) c.seed = *seed;
    if (jstar) c.jstar = *jstar;
    if (ess_frac) c.ess_frac = *ess_frac;
    if (proposal) c.proposal = *proposal;
    if (proposal_scale) c.proposal_scale = *proposal_scale;
    if (laplace_iterations) c.laplace_iterations = *laplace_iterations;
    if (hpd_level) c.hpd_level = *hpd_level;
    if (out) c.out = *out;
    return c;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dynamic mixture-of-experts models fitted by a marginal particle filter"};
  app.require_subcommand(1);

  RunFlags fit_flags;
  auto* fit = app.add_subcommand("fit", "filter a dataset with one (K, alpha) and export predictions and trajectories");
  fit_flags.attach(fit);

  RunFlags select_flags;
  auto* select = app.add_subcommand("select", "score a (K, alpha) grid by log predictive score");
  select_flags.attach(select);

  SimulateOptions sim;
  std::string sim_dgp = "m1";
  auto* simulate = app.add_subcommand("simulate", "simulate data from one of the study processes");
  simulate->add_option("--dgp", sim_dgp, "m1, m2 or m3");
  simulate->add_option("--seed", sim.seed, "random seed");
  simulate->add_option("--pairs", sim.pairs, "number of training/validation pairs (0: one dataset)");
  simulate->add_option("--intervals", sim.intervals, "number of intervals");
  simulate->add_option("--per-interval", sim.per_interval, "observations per interval");
  simulate->add_option("--out", sim.out, "output directory");

  StudyOptions study;
  std::string study_dgp;
  auto* study_cmd = app.add_subcommand("study", "replication study: grid selection and static comparison");
  study_cmd->add_option("--dgp", study_dgp, "comma-separated processes (default m1,m2,m3)");
  study_cmd->add_option("--pairs", study.pairs, "pairs per process");
  study_cmd->add_option("--particles", study.particles, "particle count M");
  study_cmd->add_option("--seed", study.seed, "random seed");
  study_cmd->add_option("--jstar", study.jstar, "intervals in the LPS (default floor(J/2))");
  study_cmd->add_option("--ess-frac", study.ess_frac, "resample when ESS < ess-frac * M");
  study_cmd->add_option("--workers", study.workers, "pairs run concurrently");
  study_cmd->add_option("--out", study.out, "output directory");

  std::string summary_input;
  int summary_jstar = 0;
  auto* summarize = app.add_subcommand("summarize", "recompute the LPS from a predictive.csv");
  summarize->add_option("--input", summary_input, "predictive.csv or a directory holding one")->required();
  summarize->add_option("--jstar", summary_jstar, "intervals in the LPS (default floor(J/2))");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kSuccess : kConfigError;
  }

  try {
    if (fit->parsed()) return run_fit(fit_flags.resolve(), std::cout);
    if (select->parsed()) return run_select(select_flags.resolve(), std::cout);
    if (simulate->parsed()) {
      sim.dgp = parse_dgp(sim_dgp);
      return run_simulate(sim, std::cout);
    }
    if (study_cmd->parsed()) {
      if (!study_dgp.empty()) {
        study.dgps.clear();
        for (const auto& name : split_list(study_dgp)) study.dgps.push_back(parse_dgp(name));
      }
      return run_study(study, std::cout);
    }
    if (summarize->parsed()) return run_summarize(summary_input, summary_jstar, std::cout);
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const dmoe::Error& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kDegeneracy;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  }
  return kConfigError;
}
