#include "dante/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "dante/csv.hpp"
#include "dante/errors.hpp"

namespace dante {
namespace {

double as_double(const std::string& key, const std::string& value) {
  const auto v = csv::to_double(value);
  if (!v) throw UsageError("config: " + key + " expects a number, got '" + value + "'");
  return *v;
}

long as_long(const std::string& key, const std::string& value) {
  const auto v = csv::to_long(value);
  if (!v) throw UsageError("config: " + key + " expects an integer, got '" + value + "'");
  return *v;
}

bool as_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  throw UsageError("config: " + key + " expects true or false, got '" + value + "'");
}

int as_int(const std::string& key, const std::string& value) {
  const long v = as_long(key, value);
  if (v < -1000000000L || v > 1000000000L) throw UsageError("config: " + key + " out of range");
  return static_cast<int>(v);
}

}  // namespace

void apply_setting(RunConfig& c, const std::string& key, const std::string& value) {
  if (key == "season.start_epiweek") {
    c.calendar = SeasonCalendar(as_int(key, value), c.calendar.weeks_per_season());
  } else if (key == "season.length") {
    c.calendar = SeasonCalendar(c.calendar.start_epiweek(), as_int(key, value));
  } else if (key == "model.gamma_shape") {
    c.hyper.gamma_shape = as_double(key, value);
  } else if (key == "model.gamma_rate") {
    c.hyper.gamma_rate = as_double(key, value);
  } else if (key == "model.t_dof") {
    c.hyper.t_dof = as_double(key, value);
  } else if (key == "model.interaction_mean_prior_var") {
    c.hyper.interaction_mean_prior_var = as_double(key, value);
  } else if (key == "model.beta_floor") {
    c.hyper.beta_floor = as_double(key, value);
  } else if (key == "mcmc.chains") {
    c.mcmc.n_chains = as_int(key, value);
  } else if (key == "mcmc.iterations") {
    c.mcmc.n_iterations = as_int(key, value);
  } else if (key == "mcmc.thin") {
    c.mcmc.thin = as_int(key, value);
  } else if (key == "mcmc.burnin") {
    c.mcmc.burnin_thinned = as_int(key, value);
  } else if (key == "mcmc.seed") {
    const long v = as_long(key, value);
    if (v < 0) throw UsageError("config: mcmc.seed must be non-negative");
    c.mcmc.seed = static_cast<std::uint64_t>(v);
  } else if (key == "mcmc.target_accept") {
    c.mcmc.target_accept = as_double(key, value);
  } else if (key == "mcmc.adapt_window") {
    c.mcmc.adapt_window = as_int(key, value);
  } else if (key == "mcmc.block_walks") {
    c.mcmc.block_walk_updates = as_bool(key, value);
  } else if (key == "evaluation.point_estimator") {
    if (value == "mean") c.point_estimator = PointEstimator::Mean;
    else if (value == "mode") c.point_estimator = PointEstimator::Mode;
    else throw UsageError("config: evaluation.point_estimator must be mean or mode");
  } else if (key == "evaluation.first_week") {
    c.windows.first_week = as_int(key, value);
  } else if (key == "evaluation.last_week") {
    c.windows.last_week = as_int(key, value);
  } else if (key == "evaluation.hpd_level") {
    c.hpd_level = as_double(key, value);
    if (!(c.hpd_level > 0.0 && c.hpd_level <= 1.0))
      throw UsageError("config: evaluation.hpd_level must lie in (0, 1]");
  } else {
    throw UsageError("config: unknown key '" + key + "'");
  }
}

RunConfig parse_config(const std::string& text, RunConfig base) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto body = csv::trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos)
      throw UsageError("config: line " + std::to_string(line_no) + ": expected key = value");
    const std::string key(csv::trim(body.substr(0, eq)));
    const std::string value(csv::trim(body.substr(eq + 1)));
    try {
      apply_setting(base, key, value);
    } catch (const UsageError& e) {
      throw UsageError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  base.hyper.validate();
  base.mcmc.validate();
  return base;
}

RunConfig load_config(const std::filesystem::path& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), std::move(base));
}

}  // namespace dante
