#include "dmoe/cli/ingest.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace dmoe::cli {

double parse_time(const std::string& text, const std::string& format) {
  if (format == "day") {
    double value = 0.0;
    if (!parse_double(text, value) || !std::isfinite(value)) throw InvalidInput("bad day value '" + text + "'");
    return value;
  }
  if (format == "date") {
    int y = 0;
    unsigned m = 0;
    unsigned d = 0;
    char dash1 = 0;
    char dash2 = 0;
    char extra = 0;
    if (std::sscanf(text.c_str(), "%d%c%u%c%u%c", &y, &dash1, &m, &dash2, &d, &extra) != 5 || dash1 != '-' ||
        dash2 != '-') {
      throw InvalidInput("bad date '" + text + "' (expected YYYY-MM-DD)");
    }
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
    if (!ymd.ok()) throw InvalidInput("invalid calendar date '" + text + "'");
    return static_cast<double>(std::chrono::sys_days{ymd}.time_since_epoch().count());
  }
  throw InvalidInput("unknown time format '" + format + "'");
}

std::vector<double> interval_boundaries(double t_min, double t_max, double width, const std::vector<double>& interior) {
  std::vector<double> bounds{t_min};
  if (!interior.empty()) {
    for (double b : interior) {
      if (!(b > bounds.back() && b < t_max)) {
        throw InvalidInput("breakpoints must increase strictly inside (min(t), max(t))");
      }
      bounds.push_back(b);
    }
  } else {
    if (!(width > 0.0)) throw InvalidInput("interval width must be positive");
    const auto J = std::max<long long>(1, static_cast<long long>(std::floor((t_max - t_min) / width)));
    for (long long j = 1; j < J; ++j) bounds.push_back(t_min + static_cast<double>(j) * width);
  }
  bounds.push_back(std::max(t_max, t_min));
  return bounds;
}

int interval_of(double t, const std::vector<double>& boundaries) {
  const int J = static_cast<int>(boundaries.size()) - 1;
  const auto it = std::upper_bound(boundaries.begin() + 1, boundaries.end() - 1, t);
  return std::min(J - 1, static_cast<int>(it - (boundaries.begin() + 1)));
}

IngestResult ingest(const CsvTable& table, const RunConfig& config) {
  config.validate();
  if (table.rows.empty()) throw InvalidInput(table.source + ": no data rows");
  const int time_col = table.column(config.time_column);
  const int y_col = table.column(config.response);
  std::vector<int> x_cols;
  std::vector<int> z_cols;
  for (const auto& name : config.x_columns) x_cols.push_back(table.column(name));
  for (const auto& name : config.z_columns) z_cols.push_back(table.column(name));
  std::vector<bool> log1p(table.header.size(), false);
  for (const auto& name : config.log1p_columns) log1p[static_cast<std::size_t>(table.column(name))] = true;

  const auto family = make_component(config.family);
  const std::size_t n = table.rows.size();
  std::vector<double> times(n);
  Vector y(static_cast<Eigen::Index>(n));
  Matrix X(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(x_cols.size() + 1));
  Matrix Z(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(z_cols.size() + 1));

  auto where = [&](std::size_t r) { return table.source + ":" + std::to_string(table.line_numbers[r]) + ": "; };
  auto number = [&](std::size_t r, int c) {
    double v = 0.0;
    const auto& text = table.rows[r][static_cast<std::size_t>(c)];
    if (!parse_double(text, v) || !std::isfinite(v)) {
      throw InvalidInput(where(r) + "cannot parse '" + text + "' in column '" +
                         table.header[static_cast<std::size_t>(c)] + "'");
    }
    if (log1p[static_cast<std::size_t>(c)]) {
      if (!(v > -1.0)) throw InvalidInput(where(r) + "log1p needs values above -1");
      v = std::log1p(v);
    }
    return v;
  };

  for (std::size_t r = 0; r < n; ++r) {
    const auto i = static_cast<Eigen::Index>(r);
    try {
      times[r] = parse_time(table.rows[r][static_cast<std::size_t>(time_col)], config.time_format);
    } catch (const InvalidInput& e) {
      throw InvalidInput(where(r) + e.what());
    }
    y[i] = number(r, y_col);
    if (!family->admissible(y[i])) {
      throw InvalidInput(where(r) + "response " + table.rows[r][static_cast<std::size_t>(y_col)] +
                         " is inadmissible for " + family->name());
    }
    X(i, 0) = 1.0;
    for (std::size_t c = 0; c < x_cols.size(); ++c) X(i, static_cast<Eigen::Index>(c + 1)) = number(r, x_cols[c]);
    Z(i, 0) = 1.0;
    for (std::size_t c = 0; c < z_cols.size(); ++c) Z(i, static_cast<Eigen::Index>(c + 1)) = number(r, z_cols[c]);
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return times[a] < times[b]; });

  std::vector<double> interior;
  for (const auto& text : config.breakpoints) interior.push_back(parse_time(text, config.time_format));

  IngestResult result;
  result.boundaries = interval_boundaries(times[order.front()], times[order.back()], config.interval_days, interior);
  const int J = static_cast<int>(result.boundaries.size()) - 1;

  std::vector<std::vector<std::size_t>> members(static_cast<std::size_t>(J));
  for (std::size_t r : order) members[static_cast<std::size_t>(interval_of(times[r], result.boundaries))].push_back(r);

  for (int j = 0; j < J; ++j) {
    const auto& rows = members[static_cast<std::size_t>(j)];
    DataBatch batch;
    batch.interval_index = j + 1;
    const auto count = static_cast<Eigen::Index>(rows.size());
    batch.y.resize(count);
    batch.X.resize(count, X.cols());
    batch.Z.resize(count, Z.cols());
    for (Eigen::Index i = 0; i < count; ++i) {
      const auto r = static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)]);
      batch.y[i] = y[r];
      batch.X.row(i) = X.row(r);
      batch.Z.row(i) = Z.row(r);
    }
    result.batches.push_back(std::move(batch));
  }
  result.spec = make_spec(1, family, x_cols, z_cols);
  return result;
}

IngestResult ingest(const RunConfig& config) {
  if (config.input.empty()) throw InvalidInput("no input file given");
  return ingest(read_csv(config.input), config);
}

}  // namespace dmoe::cli
