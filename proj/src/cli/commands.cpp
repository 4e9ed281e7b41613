#include "dmoe/cli/commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <ostream>
#include <sstream>

#include "dmoe/cli/ingest.hpp"
#include "dmoe/evaluation.hpp"

namespace dmoe::cli {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

constexpr const char* kVersion = "0.1.0";

std::string alpha_label(double alpha) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%g", alpha);
  return buffer;
}

std::string cell_dir(int K, double alpha) { return "K" + std::to_string(K) + "_alpha" + alpha_label(alpha); }

RunConfig single_cell(RunConfig config, int K, double alpha) {
  config.Ks = {K};
  config.alphas = {alpha};
  return config;
}

FilterConfig cell_filter(const RunConfig& config, int K, double alpha) {
  FilterConfig f = config.filter_config();
  f.alpha = alpha;
  f.seed = cell_seed(config.seed, K, alpha);
  return f;
}

int resolve_jstar(int requested, std::size_t intervals) {
  const int J = static_cast<int>(intervals);
  const int js = requested > 0 ? requested : default_j_star(J);
  if (js > J) throw InvalidInput("jstar " + std::to_string(js) + " exceeds the " + std::to_string(J) + " intervals");
  return js;
}

void write_dataset_csv(const fs::path& path, const SimulatedDataset& data) {
  std::ostringstream out;
  out << "t,interval,y,x,z\n";
  for (std::size_t j = 0; j < data.batches.size(); ++j) {
    const DataBatch& b = data.batches[j];
    for (Eigen::Index i = 0; i < b.size(); ++i) {
      out << data.days[j][static_cast<std::size_t>(i)] << ',' << b.interval_index << ',' << format_double(b.y[i])
          << ',' << format_double(b.X(i, 1)) << ',' << format_double(b.Z(i, 1)) << '\n';
    }
  }
  write_file_atomic(path, out.str());
}

void write_path_csv(const fs::path& path, const LatentPath& latent) {
  std::ostringstream out;
  out << "interval";
  for (const auto& name : latent.names) out << ',' << name;
  out << '\n';
  for (Eigen::Index j = 0; j < latent.values.rows(); ++j) {
    out << j + 1;
    for (Eigen::Index c = 0; c < latent.values.cols(); ++c) out << ',' << format_double(latent.values(j, c));
    out << '\n';
  }
  write_file_atomic(path, out.str());
}

void write_ingest_config(const fs::path& path, const std::string& input, const DgpSpec& spec) {
  ojson doc;
  doc["input"] = input;
  doc["x_columns"] = {"x"};
  doc["z_columns"] = {"z"};
  doc["breakpoints"] = ojson::array();
  for (int j = 1; j < spec.intervals; ++j) doc["breakpoints"].push_back(j * spec.interval_days);
  write_file_atomic(path, doc.dump(2) + "\n");
}

}  // namespace

std::vector<std::string> coefficient_names(const MixtureSpec& spec, const std::vector<std::string>& x_columns,
                                           const std::vector<std::string>& z_columns) {
  std::vector<std::string> names;
  for (int k = 1; k <= spec.K; ++k) {
    names.push_back("beta" + std::to_string(k) + "_const");
    for (const auto& c : x_columns) names.push_back("beta" + std::to_string(k) + "_" + c);
  }
  for (int k = 2; k <= spec.K; ++k) {
    names.push_back("theta" + std::to_string(k) + "_const");
    for (const auto& c : z_columns) names.push_back("theta" + std::to_string(k) + "_" + c);
  }
  return names;
}

int run_fit(const RunConfig& config, std::ostream& log) {
  config.validate();
  if (config.Ks.size() != 1 || config.alphas.size() != 1) {
    throw InvalidInput("fit takes exactly one K and one alpha; use select for grids");
  }
  const int K = config.Ks.front();
  const double alpha = config.alphas.front();
  IngestResult data = ingest(config);
  MixtureSpec spec = data.spec;
  spec.K = K;
  spec.validate();
  const FilterConfig filter = cell_filter(config, K, alpha);
  const int js = resolve_jstar(config.jstar, data.batches.size());

  const FilterRun run = run_filter(data.batches, spec, filter, true);
  const double lps = log_predictive_score(run.records, js);
  const std::string hash = config.hash();
  const fs::path out_dir(config.out);

  std::ostringstream predictive;
  predictive << "config_hash,interval,t_start,t_end,n_obs,log_pred_density,ess,resampled\n";
  std::ostringstream observations;
  observations << "config_hash,interval,observation,log_pred_density\n";
  for (std::size_t j = 0; j < run.records.size(); ++j) {
    const PredictiveRecord& r = run.records[j];
    predictive << hash << ',' << r.interval_index << ',' << format_double(data.boundaries[j]) << ','
               << format_double(data.boundaries[j + 1]) << ',' << data.batches[j].size() << ','
               << format_double(r.log_pred_density) << ',' << format_double(run.ess[j]) << ','
               << (run.resampled[j] ? 1 : 0) << '\n';
    for (std::size_t i = 0; i < r.per_observation_log_pred.size(); ++i) {
      observations << hash << ',' << r.interval_index << ',' << i + 1 << ','
                   << format_double(r.per_observation_log_pred[i]) << '\n';
    }
  }
  write_file_atomic(out_dir / "predictive.csv", predictive.str());
  write_file_atomic(out_dir / "predictive_observations.csv", observations.str());

  const auto names = coefficient_names(spec, config.x_columns, config.z_columns);
  std::ostringstream trajectories;
  for (const CoefficientSummary& s : posterior_summaries(run.trace, config.hpd_level)) {
    for (std::size_t c = 0; c < names.size(); ++c) {
      const auto i = static_cast<Eigen::Index>(c);
      ojson row;
      row["config_hash"] = hash;
      row["interval"] = s.time_index;
      row["coefficient"] = names[c];
      row["mean"] = s.mean[i];
      row["hpd_low"] = s.hpd_low[i];
      row["hpd_high"] = s.hpd_high[i];
      row["level"] = config.hpd_level;
      trajectories << row.dump() << '\n';
    }
  }
  write_file_atomic(out_dir / "trajectories.ndjson", trajectories.str());

  std::size_t observations_total = 0;
  for (const auto& b : data.batches) observations_total += static_cast<std::size_t>(b.size());
  ojson summary;
  summary["config_hash"] = hash;
  summary["version"] = kVersion;
  summary["K"] = K;
  summary["alpha"] = alpha;
  summary["seed"] = filter.seed;
  summary["intervals"] = data.batches.size();
  summary["observations"] = observations_total;
  summary["jstar"] = js;
  summary["lps"] = lps;
  summary["boundaries"] = data.boundaries;
  summary["coefficients"] = names;
  summary["config"] = config.to_json();
  write_file_atomic(out_dir / "summary.json", summary.dump(2) + "\n");

  log << "K=" << K << " alpha=" << alpha_label(alpha) << " intervals=" << data.batches.size()
      << " LPS=" << format_double(lps) << " (last " << js << " intervals)\n";
  return kSuccess;
}

int run_select(const RunConfig& config, std::ostream& log) {
  config.validate();
  IngestResult data = ingest(config);
  const int js = resolve_jstar(config.jstar, data.batches.size());
  FilterConfig filter = config.filter_config();
  const std::vector<ModelScore> scores =
      model_selection_grid(data.batches, config.Ks, config.alphas, filter, data.spec, js);
  const std::string hash = config.hash();
  const fs::path out_dir(config.out);

  std::ostringstream table;
  table << "config_hash,rank,K,alpha,lps,status,winner,cell_hash\n";
  int failed = 0;
  for (std::size_t r = 0; r < scores.size(); ++r) {
    const ModelScore& s = scores[r];
    const RunConfig cell = single_cell(config, s.K, s.alpha);
    const std::string cell_hash = cell.hash();
    if (!s.ok) ++failed;
    const bool winner = r == 0 && s.ok;
    table << hash << ',' << r + 1 << ',' << s.K << ',' << format_double(s.alpha) << ','
          << (s.ok ? format_double(s.lps) : std::string("nan")) << ',' << (s.ok ? "ok" : "failed") << ','
          << (winner ? 1 : 0) << ',' << cell_hash << '\n';

    const fs::path dir = out_dir / "cells" / cell_dir(s.K, s.alpha);
    std::ostringstream predictive;
    predictive << "config_hash,K,alpha,interval,n_obs,log_pred_density\n";
    for (const PredictiveRecord& rec : s.per_interval) {
      predictive << cell_hash << ',' << s.K << ',' << format_double(s.alpha) << ',' << rec.interval_index << ','
                 << rec.per_observation_log_pred.size() << ',' << format_double(rec.log_pred_density) << '\n';
    }
    write_file_atomic(dir / "predictive.csv", predictive.str());
    ojson status;
    status["config_hash"] = cell_hash;
    status["K"] = s.K;
    status["alpha"] = s.alpha;
    status["seed"] = s.seed;
    status["status"] = s.ok ? "ok" : "failed";
    if (s.ok) {
      status["lps"] = s.lps;
    } else {
      status["error"] = s.error;
    }
    write_file_atomic(dir / "status.json", status.dump(2) + "\n");
  }
  write_file_atomic(out_dir / "scores.csv", table.str());

  for (const ModelScore& s : scores) {
    log << "K=" << s.K << " alpha=" << alpha_label(s.alpha) << ' '
        << (s.ok ? "LPS=" + format_double(s.lps) : "failed: " + s.error) << '\n';
  }
  if (failed == static_cast<int>(scores.size())) {
    log << "every grid cell failed\n";
    return kDegeneracy;
  }
  log << "selected K=" << scores.front().K << " alpha=" << alpha_label(scores.front().alpha) << '\n';
  return failed > 0 ? kPartialFailure : kSuccess;
}

int run_simulate(const SimulateOptions& options, std::ostream& log) {
  if (options.pairs < 0) throw InvalidInput("pair count must be nonnegative");
  DgpSpec spec;
  spec.model = options.dgp;
  spec.intervals = options.intervals;
  spec.per_interval = options.per_interval;
  spec.seed = options.seed;
  spec.validate();
  const fs::path out_dir(options.out);

  if (options.pairs == 0) {
    const SimulatedDataset data = simulate(spec);
    write_dataset_csv(out_dir / "data.csv", data);
    write_path_csv(out_dir / "latent_path.csv", data.path);
    write_ingest_config(out_dir / "config.json", "data.csv", spec);
    log << "wrote " << data.observation_count() << " observations of " << to_string(options.dgp) << " to "
        << (out_dir / "data.csv").string() << '\n';
    return kSuccess;
  }
  for (int p = 0; p < options.pairs; ++p) {
    DgpSpec pair_spec = spec;
    pair_spec.seed = pair_seed(options.seed, options.dgp, p);
    const SimulatedPair pair = simulate_pair(pair_spec);
    char name[32];
    std::snprintf(name, sizeof name, "pair_%03d", p);
    const fs::path dir = out_dir / name;
    write_dataset_csv(dir / "training.csv", pair.training);
    write_dataset_csv(dir / "validation.csv", pair.validation);
    write_path_csv(dir / "latent_path.csv", pair.training.path);
    write_ingest_config(dir / "config.json", "training.csv", spec);
  }
  log << "wrote " << options.pairs << " training/validation pairs of " << to_string(options.dgp) << " to "
      << out_dir.string() << '\n';
  return kSuccess;
}

std::string StudyOptions::hash() const {
  ojson doc;
  doc["dgps"] = ojson::array();
  for (DgpModel d : dgps) doc["dgps"].push_back(to_string(d));
  doc["pairs"] = pairs;
  doc["particles"] = particles;
  doc["seed"] = seed;
  doc["jstar"] = jstar;
  doc["ess_frac"] = ess_frac;
  char buffer[17];
  std::snprintf(buffer, sizeof buffer, "%016llx", static_cast<unsigned long long>(fnv1a64(doc.dump())));
  return buffer;
}

int run_study(const StudyOptions& options, std::ostream& log) {
  StudyConfig study;
  study.dgps = options.dgps;
  study.pairs = options.pairs;
  study.filter.particles = options.particles;
  study.filter.seed = options.seed;
  study.filter.ess_threshold_fraction = options.ess_frac;
  study.j_star = options.jstar;
  study.workers = options.workers;
  if (options.jstar < 0) throw InvalidInput("jstar must be nonnegative");

  const StudyReport report = run_replication_study(study, [&](const PairOutcome& o) {
    log << to_string(o.dgp) << " pair " << o.pair << ": ";
    if (o.ok) {
      log << "K=" << o.selected_K << " alpha=" << alpha_label(o.selected_alpha)
          << " validation diff=" << format_double(o.lps_difference()) << '\n';
    } else {
      log << "failed: " << o.error << '\n';
    }
  });

  const std::string hash = options.hash();
  std::ostringstream selections;
  selections << "config_hash,dgp,pair,status,K,alpha,training_lps,failed_cells\n";
  std::ostringstream differences;
  differences << "config_hash,dgp,pair,K,alpha,validation_lps_selected,validation_lps_static,difference\n";
  std::ostringstream cells;
  bool any_failure = false;
  for (const PairOutcome& o : report.outcomes) {
    const std::string dgp = to_string(o.dgp);
    any_failure = any_failure || !o.ok || o.failed_cells > 0;
    selections << hash << ',' << dgp << ',' << o.pair << ',' << (o.ok ? "ok" : "failed") << ',' << o.selected_K
               << ',' << format_double(o.selected_alpha) << ',' << format_double(o.training_lps) << ','
               << o.failed_cells << '\n';
    if (o.ok) {
      differences << hash << ',' << dgp << ',' << o.pair << ',' << o.selected_K << ','
                  << format_double(o.selected_alpha) << ',' << format_double(o.validation_lps_selected) << ','
                  << format_double(o.validation_lps_static) << ',' << format_double(o.lps_difference()) << '\n';
    }
    for (const ModelScore& s : o.grid) {
      ojson row;
      row["config_hash"] = hash;
      row["dgp"] = dgp;
      row["pair"] = o.pair;
      row["K"] = s.K;
      row["alpha"] = s.alpha;
      row["status"] = s.ok ? "ok" : "failed";
      if (s.ok) {
        row["lps"] = s.lps;
      } else {
        row["error"] = s.error;
      }
      cells << row.dump() << '\n';
    }
  }
  const fs::path out_dir(options.out);
  write_file_atomic(out_dir / "selections.csv", selections.str());
  write_file_atomic(out_dir / "lps_differences.csv", differences.str());
  write_file_atomic(out_dir / "study.ndjson", cells.str());

  for (DgpModel dgp : options.dgps) {
    const auto outcomes = report.for_dgp(dgp);
    double sum = 0.0;
    int ok = 0;
    int dynamic_wins = 0;
    for (const PairOutcome* o : outcomes) {
      if (!o->ok) continue;
      ++ok;
      sum += o->lps_difference();
      if (o->lps_difference() > 0.0) ++dynamic_wins;
    }
    log << to_string(dgp) << ": " << ok << " of " << outcomes.size() << " pairs ok, mean validation diff "
        << format_double(ok ? sum / ok : 0.0) << ", selected beats static in " << dynamic_wins << '\n';
  }
  return any_failure ? kPartialFailure : kSuccess;
}

int run_summarize(const std::string& path, int jstar, std::ostream& out) {
  fs::path file(path);
  if (fs::is_directory(file)) file /= "predictive.csv";
  const CsvTable table = read_csv(file);
  const int hash_col = table.column("config_hash");
  const int interval_col = table.column("interval");
  const int value_col = table.column("log_pred_density");
  std::vector<PredictiveRecord> records;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    if (row[static_cast<std::size_t>(hash_col)] != table.rows.front()[static_cast<std::size_t>(hash_col)]) {
      throw InvalidInput(table.source + ":" + std::to_string(table.line_numbers[r]) + ": mixed config hashes");
    }
    PredictiveRecord rec;
    double index = 0.0;
    if (!parse_double(row[static_cast<std::size_t>(interval_col)], index) ||
        !parse_double(row[static_cast<std::size_t>(value_col)], rec.log_pred_density)) {
      throw InvalidInput(table.source + ":" + std::to_string(table.line_numbers[r]) + ": unparseable row");
    }
    rec.interval_index = static_cast<int>(index);
    if (rec.interval_index != static_cast<int>(records.size()) + 1) {
      throw InvalidInput(table.source + ":" + std::to_string(table.line_numbers[r]) + ": intervals out of order");
    }
    records.push_back(std::move(rec));
  }
  if (records.empty()) throw InvalidInput(table.source + ": no predictive records");
  const int js = resolve_jstar(jstar, records.size());
  out << "config_hash " << table.rows.front()[static_cast<std::size_t>(hash_col)] << '\n'
      << "intervals " << records.size() << '\n'
      << "jstar " << js << '\n'
      << "lps " << format_double(log_predictive_score(records, js)) << '\n';
  return kSuccess;
}

}  // namespace dmoe::cli
