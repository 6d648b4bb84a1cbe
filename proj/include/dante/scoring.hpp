#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dante/forecast.hpp"
#include "dante/targets.hpp"

namespace dante {

// Bins counted by the multibin rule for a truth: percent targets take the
// truth bin and five either side, week targets the truth week(s) and one
// either side (union over tied peaks), and a `none` onset only the none bin.
// Empty when the target is unscorable for this truth.
std::vector<int> scoring_bins(TargetKind kind, const SeasonTruth& truth, int nobs);

/// Summed probability over the scoring bins; nullopt when unscorable.
std::optional<double> multibin_score(const TargetDistribution& dist, const SeasonTruth& truth, int nobs);

inline constexpr double kLogScoreFloor = -10.0;
double floored_log(double skill);

struct WindowOptions {
  int first_week = 5;  // earliest forecast week (weeks observed)
  int last_week = 29;
};

/// Forecast weeks (values of nobs) at which a target is scored. States score
/// every week; aggregate seasonal targets start at the first forecast, onset
/// ends six weeks after the observed onset and peak targets end at the first
/// week below baseline after which the season stays below. Short-term targets
/// run from four weeks before onset to three weeks after that week. Without an
/// onset (or a baseline), every forecast week is used.
std::vector<int> evaluation_window(TargetKind kind, const SeasonTruth& truth, Scale scale,
                                   const WindowOptions& options = {});

// First 1-based week from which every later week is below baseline; nullopt
// if the season ends at or above baseline or never reaches it.
std::optional<int> final_drop_below(const SeasonTruth& truth);

struct ScoreRecord {
  std::string model;
  std::string location;
  Scale scale = Scale::State;
  int season = 0;  // starting year
  TargetKind target = TargetKind::Week1;
  int forecast_week = 0;
  double skill = 0.0;
  double log_skill = 0.0;
};

/// exp(mean log_skill); NaN for an empty set.
double average_scores(std::span<const ScoreRecord> records);
double geometric_mean_skill(std::span<const double> skills);

std::string score_table_header();
std::string score_row(const ScoreRecord& r);
void write_scores(const std::filesystem::path& path, const std::vector<ScoreRecord>& records);
std::vector<ScoreRecord> read_scores(const std::filesystem::path& path);
std::vector<ScoreRecord> parse_scores(const std::string& text);

// (location, season start year) -> baseline percent.
using Baselines = std::map<std::pair<std::string, int>, double>;
Baselines load_baselines(const std::filesystem::path& path);
Baselines parse_baselines(const std::string& text);
std::optional<double> find_baseline(const Baselines& b, const std::string& location, int season);

}  // namespace dante
