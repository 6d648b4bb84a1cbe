#include "dante/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "dante/csv.hpp"
#include "dante/errors.hpp"

namespace dante {
namespace {

void add_week_window(std::set<int>& bins, int week, int T) {
  for (int w = week - 1; w <= week + 1; ++w)
    if (w >= 1 && w <= T) bins.insert(w - 1);
}

bool above(const SeasonTruth& truth, int t) {
  const double v = truth.percent[t];
  return !std::isnan(v) && tenths(v) >= tenths(*truth.baseline);
}

std::vector<int> clipped(int lo, int hi, const WindowOptions& o) {
  std::vector<int> weeks;
  for (int w = std::max(lo, o.first_week); w <= std::min(hi, o.last_week); ++w) weeks.push_back(w);
  return weeks;
}

}  // namespace

std::vector<int> scoring_bins(TargetKind kind, const SeasonTruth& truth, int nobs) {
  const int T = static_cast<int>(truth.percent.size());
  if (is_seasonal(kind) && !truth.seasonal_scorable) return {};
  if (is_percent_valued(kind)) {
    double value;
    if (kind == TargetKind::PeakIntensity) {
      value = truth.peak.intensity;
    } else {
      const int t = nobs + weeks_ahead(kind);
      if (t < 1 || t > T) return {};
      value = truth.percent[t - 1];
    }
    if (std::isnan(value)) return {};
    const int centre = percent_bin(value);
    std::vector<int> bins;
    for (int b = std::max(0, centre - 5); b <= std::min(kPercentBins - 1, centre + 5); ++b)
      bins.push_back(b);
    return bins;
  }
  std::set<int> bins;
  if (kind == TargetKind::Onset) {
    if (!truth.baseline) return {};
    if (!truth.onset) return {T};  // none bin
    add_week_window(bins, *truth.onset, T);
  } else {
    if (truth.peak.weeks.empty()) return {};
    for (int w : truth.peak.weeks) add_week_window(bins, w, T);
  }
  return {bins.begin(), bins.end()};
}

std::optional<double> multibin_score(const TargetDistribution& dist, const SeasonTruth& truth, int nobs) {
  const auto bins = scoring_bins(dist.kind, truth, nobs);
  if (bins.empty()) return std::nullopt;
  double skill = 0.0;
  for (int b : bins) {
    if (b >= dist.size()) throw UsageError("distribution has too few bins for " + target_name(dist.kind));
    skill += dist.probs[b];
  }
  return std::min(skill, 1.0);
}

double floored_log(double skill) {
  if (!(skill > 0.0)) return kLogScoreFloor;
  return std::max(std::log(skill), kLogScoreFloor);
}

std::optional<int> final_drop_below(const SeasonTruth& truth) {
  if (!truth.baseline) return std::nullopt;
  const int T = static_cast<int>(truth.percent.size());
  int last_above = -1;
  for (int t = 0; t < T; ++t)
    if (above(truth, t)) last_above = t;
  if (last_above < 0 || last_above == T - 1) return std::nullopt;
  return last_above + 2;
}

std::vector<int> evaluation_window(TargetKind kind, const SeasonTruth& truth, Scale scale,
                                   const WindowOptions& o) {
  const int T = static_cast<int>(truth.percent.size());
  const int all_hi = o.last_week;
  if (scale == Scale::State || !truth.baseline) return clipped(o.first_week, all_hi, o);

  int last_above = -1;
  for (int t = 0; t < T; ++t)
    if (above(truth, t)) last_above = t;
  // Week the series settles below baseline; a season ending above runs to T.
  const std::optional<int> drop =
      last_above < 0 ? std::nullopt : std::optional<int>(std::min(last_above + 2, T));

  switch (kind) {
    case TargetKind::Onset:
      if (!truth.onset) return clipped(o.first_week, all_hi, o);
      return clipped(o.first_week, *truth.onset + 6, o);
    case TargetKind::PeakTiming:
    case TargetKind::PeakIntensity:
      if (!drop) return clipped(o.first_week, all_hi, o);
      return clipped(o.first_week, *drop, o);
    default:
      if (!truth.onset || !drop) return clipped(o.first_week, all_hi, o);
      return clipped(*truth.onset - 4, *drop + 3, o);
  }
}

double geometric_mean_skill(std::span<const double> skills) {
  if (skills.empty()) return std::numeric_limits<double>::quiet_NaN();
  double sum = 0.0;
  for (double s : skills) sum += floored_log(s);
  return std::exp(sum / static_cast<double>(skills.size()));
}

double average_scores(std::span<const ScoreRecord> records) {
  if (records.empty()) return std::numeric_limits<double>::quiet_NaN();
  double sum = 0.0;
  for (const auto& r : records) sum += std::max(r.log_skill, kLogScoreFloor);
  return std::exp(sum / static_cast<double>(records.size()));
}

std::string score_table_header() {
  return "model,location,scale,season,target,forecast_week,skill,log_skill";
}

std::string score_row(const ScoreRecord& r) {
  std::ostringstream out;
  out << r.model << ',' << r.location << ',' << scale_name(r.scale) << ',' << r.season << ','
      << target_short_name(r.target) << ',' << r.forecast_week << ',' << csv::format_double(r.skill)
      << ',' << csv::format_double(r.log_skill);
  return out.str();
}

void write_scores(const std::filesystem::path& path, const std::vector<ScoreRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << score_table_header() << '\n';
  for (const auto& r : records) out << score_row(r) << '\n';
}

std::vector<ScoreRecord> parse_scores(const std::string& text) {
  const auto table = csv::parse(text);
  const char* what = "score table";
  const auto c_model = table.require("model", what);
  const auto c_loc = table.require("location", what);
  const auto c_scale = table.require("scale", what);
  const auto c_season = table.require("season", what);
  const auto c_target = table.require("target", what);
  const auto c_week = table.require("forecast_week", what);
  const auto c_skill = table.require("skill", what);
  const auto c_log = table.require("log_skill", what);
  std::vector<ScoreRecord> out;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& f = table.rows[i];
    const std::string where = "score table: line " + std::to_string(table.line_numbers[i]) + ": ";
    if (f.size() != table.header.size()) throw DataError(where + "wrong number of fields");
    ScoreRecord r;
    r.model = f[c_model];
    r.location = f[c_loc];
    const auto scale = scale_from_name(f[c_scale]);
    const auto target = target_from_name(f[c_target]);
    const auto season = csv::to_long(f[c_season]);
    const auto week = csv::to_long(f[c_week]);
    const auto skill = csv::to_double(f[c_skill]);
    const auto log_skill = csv::to_double(f[c_log]);
    if (!scale || !target || !season || !week || !skill || !log_skill)
      throw DataError(where + "unparseable field");
    r.scale = *scale;
    r.target = *target;
    r.season = static_cast<int>(*season);
    r.forecast_week = static_cast<int>(*week);
    r.skill = *skill;
    r.log_skill = *log_skill;
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<ScoreRecord> read_scores(const std::filesystem::path& path) {
  return parse_scores(csv::read_file(path));
}

Baselines parse_baselines(const std::string& text) {
  const auto table = csv::parse(text);
  const char* what = "baselines CSV";
  const auto c_loc = table.require("location", what);
  const auto c_season = table.require("season", what);
  const auto c_value = table.require("baseline_percent", what);
  Baselines out;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& f = table.rows[i];
    const std::string where = "baselines CSV: line " + std::to_string(table.line_numbers[i]) + ": ";
    if (f.size() != table.header.size()) throw DataError(where + "wrong number of fields");
    const auto season = csv::to_long(f[c_season]);
    const auto value = csv::to_double(f[c_value]);
    if (!season || !value || *value < 0.0) throw DataError(where + "bad season or baseline");
    if (!out.emplace(std::make_pair(f[c_loc], static_cast<int>(*season)), *value).second)
      throw DataError(where + "duplicate baseline for " + f[c_loc]);
  }
  return out;
}

Baselines load_baselines(const std::filesystem::path& path) { return parse_baselines(csv::read_file(path)); }

std::optional<double> find_baseline(const Baselines& b, const std::string& location, int season) {
  auto it = b.find({location, season});
  if (it == b.end()) return std::nullopt;
  return it->second;
}

}  // namespace dante
