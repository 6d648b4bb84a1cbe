#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace dante {

struct TrajectoryDraws;

enum class TargetKind { Week1, Week2, Week3, Week4, Onset, PeakTiming, PeakIntensity };

inline constexpr TargetKind kAllTargets[] = {TargetKind::Onset,         TargetKind::PeakTiming,
                                             TargetKind::PeakIntensity, TargetKind::Week1,
                                             TargetKind::Week2,         TargetKind::Week3,
                                             TargetKind::Week4};
inline constexpr TargetKind kShortTermTargets[] = {TargetKind::Week1, TargetKind::Week2,
                                                   TargetKind::Week3, TargetKind::Week4};

bool is_percent_valued(TargetKind kind);
inline bool is_week_valued(TargetKind kind) { return !is_percent_valued(kind); }
bool is_seasonal(TargetKind kind);
// 1..4 for the short-term targets, 0 otherwise.
int weeks_ahead(TargetKind kind);

// FluSight target labels, e.g. "1 wk ahead", "Season onset".
std::string target_name(TargetKind kind);
std::optional<TargetKind> target_from_name(const std::string& name);
// Short labels used in report tables: wk1..wk4, onset, pt, pi.
std::string target_short_name(TargetKind kind);

// Percent bins [0.0,0.1), ..., [12.9,13.0), [13.0,100].
inline constexpr int kPercentBins = 131;
inline constexpr double kPercentBinWidth = 0.1;

/// Number of tenths after rounding a percentage half away from zero.
long tenths(double percent);
/// Percentage rounded to the nearest tenth, half away from zero (5.387 -> 5.4).
double round_tenth(double percent);

int percent_bin(double percent);
double percent_bin_start(int bin);
double percent_bin_end(int bin);

// Binned predictive distribution of one target. Percent targets use the 131
// percent bins; peak timing uses one bin per season week (bin i is week i+1);
// onset adds a trailing `none` bin.
struct TargetDistribution {
  TargetKind kind = TargetKind::Week1;
  std::vector<double> probs;

  int size() const { return static_cast<int>(probs.size()); }
  int none_bin() const { return size() - 1; }  // onset only
  double total() const;
};

int bin_count(TargetKind kind, int weeks_per_season);

inline constexpr double kWeekPad = 0.00018;
inline constexpr double kPercentPad = 0.00005;

/// Raises every bin to at least the kind's pad and renormalises.
TargetDistribution pad_distribution(const TargetDistribution& dist);
TargetDistribution pad_distribution(const TargetDistribution& dist, double pad);

/// First week (1-based) of the earliest run of at least three consecutive
/// weeks at or above `baseline`; weeks are rounded to tenths first and NaN
/// weeks break runs. nullopt when no such run exists.
std::optional<int> compute_onset(std::span<const double> percent, double baseline);

struct Peak {
  double intensity = 0.0;  // rounded percent; NaN if no data
  std::vector<int> weeks;  // 1-based weeks attaining the rounded maximum
};

/// Rounded maximum and every week attaining it. NaN weeks are skipped.
Peak compute_peak(std::span<const double> percent);

// Validation values of every target for one location-season.
struct SeasonTruth {
  std::vector<double> percent;  // rounded to tenths; NaN where missing
  std::optional<double> baseline;
  std::optional<int> onset;  // meaningful only with a baseline
  Peak peak;
  bool seasonal_scorable = true;
};

SeasonTruth make_truth(std::span<const double> percent, std::optional<double> baseline,
                       bool seasonal_scorable = true);

/// Empirical binned distributions over the M draws of one location. Short-term
/// targets read week nobs+n; seasonal targets are computed per draw from the
/// full trajectory (observed prefix already spliced in). Onset is produced only
/// when a baseline is given; targets past the season end are omitted.
/// Distributions are padded.
std::vector<TargetDistribution> target_distributions(const TrajectoryDraws& draws, int location,
                                                     int nobs, std::optional<double> baseline,
                                                     bool pad = true);

}  // namespace dante
