#ifndef DMOE_CLI_INGEST_HPP
#define DMOE_CLI_INGEST_HPP

#include <string>
#include <vector>

#include "dmoe/cli/config.hpp"
#include "dmoe/cli/io.hpp"
#include "dmoe/mixture.hpp"

namespace dmoe::cli {

struct IngestResult {
  std::vector<DataBatch> batches;
  /// tau_0 < tau_1 < ... < tau_J, tau_0 = min(t), tau_J = max(t).
  std::vector<double> boundaries;
  /// Model structure implied by the covariate selections (K = 1; callers set K).
  MixtureSpec spec;
};

/// Day number of a time value: a plain number for "day", days since
/// 1970-01-01 for "date" (YYYY-MM-DD).
double parse_time(const std::string& text, const std::string& format);

/// Interval boundaries covering [t_min, t_max]. With interior breakpoints those
/// are used; otherwise J = max(1, floor((t_max - t_min) / width)) intervals of
/// the given width with the last one stretched to t_max.
std::vector<double> interval_boundaries(double t_min, double t_max, double width,
                                        const std::vector<double>& interior);

/// Index j in [0, J) of the half-open interval [tau_j, tau_{j+1}) holding t; the
/// last interval is closed on the right.
int interval_of(double t, const std::vector<double>& boundaries);

IngestResult ingest(const CsvTable& table, const RunConfig& config);
IngestResult ingest(const RunConfig& config);

}  // namespace dmoe::cli

#endif
