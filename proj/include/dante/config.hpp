#pragma once

#include <filesystem>
#include <string>

#include "dante/calendar.hpp"
#include "dante/model.hpp"
#include "dante/sampler.hpp"
#include "dante/scoring.hpp"

namespace dante {

enum class PointEstimator { Mean, Mode };

// Everything a run reads from the `key = value` config file.
struct RunConfig {
  SeasonCalendar calendar;
  Hyperconfig hyper;
  McmcConfig mcmc;
  PointEstimator point_estimator = PointEstimator::Mean;  // percent targets
  WindowOptions windows;
  double hpd_level = 0.9;
};

/// Applies one setting, e.g. ("mcmc.chains", "3"). Unknown keys and
/// malformed values throw UsageError.
void apply_setting(RunConfig& config, const std::string& key, const std::string& value);

/// Lines of `key = value`; `#` starts a comment, blank lines are ignored.
RunConfig parse_config(const std::string& text, RunConfig base = {});
RunConfig load_config(const std::filesystem::path& path, RunConfig base = {});

}  // namespace dante
