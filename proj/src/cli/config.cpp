#include "dmoe/cli/config.hpp"

#include <cstdio>
#include <set>

#include "dmoe/cli/io.hpp"

namespace dmoe::cli {

using nlohmann::json;

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

nlohmann::ordered_json RunConfig::to_json() const {
  nlohmann::ordered_json doc;
  doc["input"] = input;
  doc["time_column"] = time_column;
  doc["time_format"] = time_format;
  doc["response"] = response;
  doc["x_columns"] = x_columns;
  doc["z_columns"] = z_columns;
  doc["interval_days"] = interval_days;
  doc["breakpoints"] = breakpoints;
  doc["log1p"] = log1p_columns;
  doc["family"] = family;
  doc["k"] = Ks;
  doc["alpha"] = alphas;
  doc["particles"] = particles;
  doc["seed"] = seed;
  doc["jstar"] = jstar;
  doc["ess_frac"] = ess_frac;
  doc["proposal_scale"] = proposal_scale;
  doc["proposal"] = proposal;
  doc["laplace_iterations"] = laplace_iterations;
  doc["hpd_level"] = hpd_level;
  return doc;
}

namespace {

template <typename T>
std::vector<T> scalar_or_list(const json& value, const char* key) {
  try {
    if (value.is_array()) return value.get<std::vector<T>>();
    return {value.get<T>()};
  } catch (const json::exception&) {
    throw InvalidInput(std::string("config field '") + key + "' has the wrong type");
  }
}

std::vector<std::string> strings_or_numbers(const json& value, const char* key) {
  if (!value.is_array()) throw InvalidInput(std::string("config field '") + key + "' must be a list");
  std::vector<std::string> out;
  for (const auto& item : value) {
    if (item.is_string()) {
      out.push_back(item.get<std::string>());
    } else if (item.is_number()) {
      out.push_back(format_double(item.get<double>()));
    } else {
      throw InvalidInput(std::string("config field '") + key + "' must hold strings or numbers");
    }
  }
  return out;
}

}  // namespace

RunConfig RunConfig::from_json(const json& doc) {
  if (!doc.is_object()) throw InvalidInput("config must be a JSON object");
  static const std::set<std::string> known = {
      "input", "time_column", "time_format", "response", "x_columns", "z_columns", "interval_days",
      "breakpoints", "log1p", "family", "k", "alpha", "particles", "seed", "jstar", "ess_frac",
      "proposal_scale", "proposal", "laplace_iterations", "hpd_level", "out"};
  for (const auto& [key, value] : doc.items()) {
    if (!known.contains(key)) throw InvalidInput("unknown config field '" + key + "'");
  }
  RunConfig c;
  auto get = [&](const char* key, auto& field) {
    if (!doc.contains(key)) return;
    try {
      doc.at(key).get_to(field);
    } catch (const json::exception&) {
      throw InvalidInput(std::string("config field '") + key + "' has the wrong type");
    }
  };
  get("input", c.input);
  get("time_column", c.time_column);
  get("time_format", c.time_format);
  get("response", c.response);
  get("x_columns", c.x_columns);
  get("z_columns", c.z_columns);
  get("interval_days", c.interval_days);
  if (doc.contains("breakpoints")) c.breakpoints = strings_or_numbers(doc.at("breakpoints"), "breakpoints");
  get("log1p", c.log1p_columns);
  get("family", c.family);
  if (doc.contains("k")) c.Ks = scalar_or_list<int>(doc.at("k"), "k");
  if (doc.contains("alpha")) c.alphas = scalar_or_list<double>(doc.at("alpha"), "alpha");
  get("particles", c.particles);
  get("seed", c.seed);
  get("jstar", c.jstar);
  get("ess_frac", c.ess_frac);
  get("proposal_scale", c.proposal_scale);
  get("proposal", c.proposal);
  get("laplace_iterations", c.laplace_iterations);
  get("hpd_level", c.hpd_level);
  get("out", c.out);
  return c;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidInput(path.string() + ": " + e.what());
  }
  RunConfig config = from_json(doc);
  // a relative input path is relative to the config file
  if (!config.input.empty() && std::filesystem::path(config.input).is_relative() && path.has_parent_path()) {
    config.input = (path.parent_path() / config.input).lexically_normal().string();
  }
  return config;
}

std::string RunConfig::hash() const {
  char buffer[17];
  std::snprintf(buffer, sizeof buffer, "%016llx", static_cast<unsigned long long>(fnv1a64(to_json().dump())));
  return buffer;
}

FilterConfig RunConfig::filter_config() const {
  FilterConfig f;
  f.particles = particles;
  f.alpha = alphas.empty() ? 0.99 : alphas.front();
  f.ess_threshold_fraction = ess_frac;
  f.seed = seed;
  f.proposal_scale = proposal_scale;
  f.proposal = proposal == "bootstrap" ? ProposalKind::kBootstrap : ProposalKind::kTailored;
  f.laplace.iterations = laplace_iterations;
  return f;
}

void RunConfig::validate() const {
  if (time_format != "day" && time_format != "date") {
    throw InvalidInput("time_format must be 'day' or 'date'");
  }
  if (Ks.empty()) throw InvalidInput("at least one K is required");
  for (int K : Ks)
    if (K < 1 || K > kMaxComponents) throw InvalidInput("K out of range");
  if (alphas.empty()) throw InvalidInput("at least one alpha is required");
  for (double a : alphas)
    if (!(a > 0.0 && a < 1.0)) throw InvalidInput("alpha must lie in (0, 1)");
  if (particles < 1) throw InvalidInput("particle count must be positive");
  if (jstar < 0) throw InvalidInput("jstar must be nonnegative");
  if (!(ess_frac > 0.0 && ess_frac <= 1.0)) throw InvalidInput("ess_frac must lie in (0, 1]");
  if (!(proposal_scale >= 1.0)) throw InvalidInput("proposal_scale must be at least 1");
  if (proposal != "tailored" && proposal != "bootstrap") {
    throw InvalidInput("proposal must be 'tailored' or 'bootstrap'");
  }
  if (laplace_iterations < 1) throw InvalidInput("laplace_iterations must be at least 1");
  if (!(hpd_level > 0.0 && hpd_level < 1.0)) throw InvalidInput("hpd_level must lie in (0, 1)");
  if (breakpoints.empty() && !(interval_days > 0.0)) throw InvalidInput("interval_days must be positive");
}

}  // namespace dmoe::cli
