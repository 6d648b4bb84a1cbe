#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dante/config.hpp"
#include "dante/epidata.hpp"
#include "dante/forecast.hpp"
#include "dante/sampler.hpp"
#include "dante/scoring.hpp"
#include "dante/targets.hpp"
#include "dante/volatility.hpp"

namespace dante {

/// Bins in descending probability (ties by bin order) until the mass reaches
/// `level`; returns the bin count times the bin width (0.1 percent or 1 week).
/// The chosen bins need not be contiguous.
double hpd_width(const TargetDistribution& dist, double level = 0.9);
int hpd_bin_count(const TargetDistribution& dist, double level = 0.9);

/// Percent targets: probability-weighted bin midpoints (or the modal bin's
/// midpoint). Week targets: the modal week, earliest on ties. nullopt when an
/// onset's mode is the `none` bin.
std::optional<double> point_prediction(const TargetDistribution& dist,
                                       PointEstimator estimator = PointEstimator::Mean);

// Truth value a point prediction is compared with; nullopt when undefined.
// Tied peak weeks use the one nearest the prediction.
std::optional<double> truth_value(TargetKind kind, const SeasonTruth& truth, int nobs,
                                  std::optional<double> prediction = std::nullopt);

struct PointRecord {
  std::string model;
  std::string location;
  Scale scale = Scale::State;
  int season = 0;
  TargetKind target = TargetKind::Week1;
  int forecast_week = 0;
  double point = 0.0;
  double truth = 0.0;
  double sq_error = 0.0;
};

struct HpdRecord {
  std::string model;
  std::string location;
  Scale scale = Scale::State;
  int season = 0;
  TargetKind target = TargetKind::Week1;
  int forecast_week = 0;
  double level = 0.9;
  double width = 0.0;
};

struct DiagnosticRecord {
  int season = 0;
  int forecast_week = 0;
  std::string parameter;
  double rhat = 0.0;
  double ess = 0.0;
};

struct ExperimentPlan {
  std::vector<int> seasons;         // 0-based season indices to forecast
  std::vector<int> forecast_weeks;  // values of nobs
  std::vector<Scale> scales{Scale::State, Scale::Region, Scale::National};
  std::string model = "dante";
};

struct EvaluationInputs {
  IliPanel states;                  // state ILI
  std::optional<IliPanel> aggregates;  // reported regional/national wILI for pass-through and truth
  WeightMatrix weights;
  Baselines baselines;
};

// Everything produced for one (season, nobs) job.
struct JobResult {
  int season = 0;
  int forecast_week = 0;
  std::vector<ScoreRecord> scores;
  std::vector<PointRecord> points;
  std::vector<HpdRecord> hpd;
  std::vector<DiagnosticRecord> diagnostics;
  std::vector<std::string> warnings;
};

struct SummaryRow {
  std::string metric;    // skill, mse, hpd_width
  std::string scale;     // state, region, national or all
  std::string group_by;  // scale, location, target, season
  std::string group;
  double value = 0.0;
  std::size_t n = 0;
};

struct EvaluationResult {
  std::vector<ScoreRecord> scores;
  std::vector<PointRecord> points;
  std::vector<HpdRecord> hpd;
  std::vector<DiagnosticRecord> diagnostics;
  std::vector<std::string> warnings;
  std::vector<SummaryRow> summary;
};

// Truth for every location of the forecast season: states from the state
// panel, aggregates from the reported series when given (else re-aggregated).
struct SeasonTruths {
  std::vector<std::string> locations;
  std::vector<Scale> scales;
  std::vector<SeasonTruth> truths;
};
SeasonTruths season_truths(const EvaluationInputs& inputs, int season);
// Appends every region of `panel` for the season labelled `season_label`;
// aggregate locations get their baselines. No-op if the season is absent.
void append_truths(SeasonTruths& truths, const IliPanel& panel, int season_label, bool aggregate_scale,
                   const Baselines& baselines);

/// Scores one forecast: trajectories for all locations against truth, within
/// the evaluation windows.
JobResult score_job(const TrajectoryDraws& trajectories, const SeasonTruths& truths, int season_label,
                    int nobs, const RunConfig& config, const std::string& model,
                    const std::vector<Scale>& scales = {Scale::State, Scale::Region, Scale::National});

/// Scores FluSight-style forecasts made after `nobs` weeks; locations without
/// a truth are skipped.
JobResult score_forecasts(const std::vector<LocationForecast>& forecasts, const SeasonTruths& truths,
                          int season_label, int nobs, const RunConfig& config, const std::string& model,
                          const std::vector<Scale>& scales = {Scale::State, Scale::Region, Scale::National});

/// Fit, predict, aggregate and score one (season, nobs) job.
JobResult run_job(const EvaluationInputs& inputs, int season, int nobs, const RunConfig& config,
                  const std::string& model, int jobs = 1);

/// Leave-one-season-out evaluation over the plan; jobs run on up to `jobs` threads.
EvaluationResult run_loso(const ExperimentPlan& plan, const EvaluationInputs& inputs, const RunConfig& config,
                          int jobs = 1, const std::function<void(const JobResult&)>& progress = {});

/// Skill (geometric mean), MSE and mean HPD width by scale, location, target and season.
std::vector<SummaryRow> summarize(const std::vector<ScoreRecord>& scores, const std::vector<PointRecord>& points,
                                  const std::vector<HpdRecord>& hpd);

// Report directory: scores.csv, mse.csv, hpd.csv, summary.csv, diagnostics.csv,
// and volatility.csv when a report is given.
void emit_report(const std::filesystem::path& dir, const EvaluationResult& result,
                 const VolatilityReport* volatility = nullptr);

std::string points_csv_text(const std::vector<PointRecord>& points);
std::vector<PointRecord> parse_points_csv(const std::string& text);
std::string hpd_csv_text(const std::vector<HpdRecord>& hpd);
std::vector<HpdRecord> parse_hpd_csv(const std::string& text);
std::string summary_csv_text(const std::vector<SummaryRow>& rows);
std::vector<SummaryRow> parse_summary_csv(const std::string& text);
std::string diagnostics_csv_text(const std::vector<DiagnosticRecord>& rows);

}  // namespace dante
