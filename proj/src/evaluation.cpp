#include "dante/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include "dante/csv.hpp"
#include "dante/errors.hpp"

namespace dante {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double bin_width(TargetKind kind) { return is_percent_valued(kind) ? kPercentBinWidth : 1.0; }

// Midpoint of a percent bin; the open-ended top bin counts as 0.1 wide.
double percent_midpoint(int bin) { return (bin + 0.5) / 10.0; }

TrajectoryDraws concat(const TrajectoryDraws& a, const TrajectoryDraws& b) {
  std::vector<std::string> names = a.locations;
  names.insert(names.end(), b.locations.begin(), b.locations.end());
  std::vector<Scale> scales = a.scales;
  scales.insert(scales.end(), b.scales.begin(), b.scales.end());
  TrajectoryDraws out(std::move(names), std::move(scales), a.T, a.M);
  std::copy(a.y.begin(), a.y.end(), out.y.begin());
  std::copy(b.y.begin(), b.y.end(), out.y.begin() + static_cast<std::ptrdiff_t>(a.y.size()));
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
}

std::string num(double v) { return std::isnan(v) ? "NA" : csv::format_double(v); }

double parse_num(const std::string& field, const std::string& where) {
  if (field == "NA") return kNaN;
  const auto v = csv::to_double(field);
  if (!v) throw DataError(where + "bad number '" + field + "'");
  return *v;
}

struct KeyFields {
  std::string model, location;
  Scale scale;
  int season;
  TargetKind target;
  int forecast_week;
};

KeyFields parse_key(const csv::Table& table, const std::vector<std::string>& f, const std::string& where) {
  const char* what = "report table";
  KeyFields k;
  k.model = f[table.require("model", what)];
  k.location = f[table.require("location", what)];
  const auto scale = scale_from_name(f[table.require("scale", what)]);
  const auto target = target_from_name(f[table.require("target", what)]);
  const auto season = csv::to_long(f[table.require("season", what)]);
  const auto week = csv::to_long(f[table.require("forecast_week", what)]);
  if (!scale || !target || !season || !week) throw DataError(where + "unparseable key field");
  k.scale = *scale;
  k.target = *target;
  k.season = static_cast<int>(*season);
  k.forecast_week = static_cast<int>(*week);
  return k;
}

template <typename Rec>
void key_out(std::ostringstream& out, const Rec& r) {
  out << r.model << ',' << r.location << ',' << scale_name(r.scale) << ',' << r.season << ','
      << target_short_name(r.target) << ',' << r.forecast_week;
}

constexpr const char* kKeyHeader = "model,location,scale,season,target,forecast_week";

}  // namespace

int hpd_bin_count(const TargetDistribution& dist, double level) {
  std::vector<int> order(dist.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return dist.probs[a] > dist.probs[b]; });
  const double total = dist.total();
  double mass = 0.0;
  int count = 0;
  for (int b : order) {
    mass += dist.probs[b];
    ++count;
    if (mass >= level * total - 1e-12) break;
  }
  return count;
}

double hpd_width(const TargetDistribution& dist, double level) {
  return hpd_bin_count(dist, level) * bin_width(dist.kind);
}

std::optional<double> point_prediction(const TargetDistribution& dist, PointEstimator estimator) {
  const auto mode = static_cast<int>(std::max_element(dist.probs.begin(), dist.probs.end()) - dist.probs.begin());
  if (is_percent_valued(dist.kind)) {
    if (estimator == PointEstimator::Mode) return percent_midpoint(mode);
    double num = 0.0, den = 0.0;
    for (int b = 0; b < dist.size(); ++b) {
      num += dist.probs[b] * percent_midpoint(b);
      den += dist.probs[b];
    }
    return num / den;
  }
  if (dist.kind == TargetKind::Onset && mode == dist.none_bin()) return std::nullopt;
  return static_cast<double>(mode + 1);
}

std::optional<double> truth_value(TargetKind kind, const SeasonTruth& truth, int nobs,
                                  std::optional<double> prediction) {
  const int T = static_cast<int>(truth.percent.size());
  switch (kind) {
    case TargetKind::Onset:
      if (!truth.baseline || !truth.onset || !truth.seasonal_scorable) return std::nullopt;
      return static_cast<double>(*truth.onset);
    case TargetKind::PeakIntensity:
      if (!truth.seasonal_scorable || std::isnan(truth.peak.intensity)) return std::nullopt;
      return truth.peak.intensity;
    case TargetKind::PeakTiming: {
      if (!truth.seasonal_scorable || truth.peak.weeks.empty()) return std::nullopt;
      double best = truth.peak.weeks.front();
      if (prediction)
        for (int w : truth.peak.weeks)
          if (std::fabs(w - *prediction) < std::fabs(best - *prediction)) best = w;
      return best;
    }
    default: {
      const int t = nobs + weeks_ahead(kind);
      if (t < 1 || t > T || std::isnan(truth.percent[t - 1])) return std::nullopt;
      return truth.percent[t - 1];
    }
  }
}

void append_truths(SeasonTruths& out, const IliPanel& panel, int season_label, bool aggregate_scale,
                   const Baselines& baselines) {
  const auto s = panel.season_index(season_label);
  if (!s || panel.R() == 0) return;
  const auto scorable = scorable_seasonal_targets(panel, peak_history(panel));
  std::vector<double> pct(panel.T());
  for (int r = 0; r < panel.R(); ++r) {
    for (int t = 0; t < panel.T(); ++t) pct[t] = 100.0 * panel.value(r, *s, t);
    const auto& name = panel.region_names()[r];
    const Scale scale = aggregate_scale ? scale_of_location(name) : Scale::State;
    const auto baseline = aggregate_scale ? find_baseline(baselines, name, season_label) : std::nullopt;
    out.locations.push_back(name);
    out.scales.push_back(scale);
    out.truths.push_back(make_truth(pct, baseline, scorable[r][*s]));
  }
}

SeasonTruths season_truths(const EvaluationInputs& in, int season) {
  SeasonTruths out;
  const int label = in.states.season_labels().at(season);
  append_truths(out, in.states, label, false, in.baselines);
  if (in.aggregates)
    append_truths(out, *in.aggregates, label, true, in.baselines);
  else
    append_truths(out, aggregate_panel(in.states, in.weights), label, true, in.baselines);
  return out;
}

namespace {

void score_location(JobResult& res, const std::string& location, Scale scale,
                    const std::vector<TargetDistribution>& dists, const SeasonTruth& truth, int season_label,
                    int nobs, const RunConfig& config, const std::string& model) {
  for (const auto& dist : dists) {
    const auto window = evaluation_window(dist.kind, truth, scale, config.windows);
    if (std::find(window.begin(), window.end(), nobs) == window.end()) continue;
    const auto skill = multibin_score(dist, truth, nobs);
    if (!skill) continue;
    res.scores.push_back({model, location, scale, season_label, dist.kind, nobs, *skill, floored_log(*skill)});
    res.hpd.push_back({model, location, scale, season_label, dist.kind, nobs, config.hpd_level,
                       hpd_width(dist, config.hpd_level)});
    const auto point = point_prediction(dist, config.point_estimator);
    const auto actual = truth_value(dist.kind, truth, nobs, point);
    if (point && actual)
      res.points.push_back({model, location, scale, season_label, dist.kind, nobs, *point, *actual,
                            (*point - *actual) * (*point - *actual)});
  }
}

bool wanted(const std::vector<Scale>& scales, Scale s) {
  return std::find(scales.begin(), scales.end(), s) != scales.end();
}

}  // namespace

JobResult score_job(const TrajectoryDraws& traj, const SeasonTruths& truths, int season_label, int nobs,
                    const RunConfig& config, const std::string& model, const std::vector<Scale>& scales) {
  JobResult res;
  res.season = season_label;
  res.forecast_week = nobs;
  for (std::size_t i = 0; i < truths.locations.size(); ++i) {
    if (!wanted(scales, truths.scales[i])) continue;
    const auto loc = traj.location_index(truths.locations[i]);
    if (!loc) continue;
    const SeasonTruth& truth = truths.truths[i];
    score_location(res, truths.locations[i], truths.scales[i],
                   target_distributions(traj, *loc, nobs, truth.baseline), truth, season_label, nobs, config,
                   model);
  }
  return res;
}

JobResult score_forecasts(const std::vector<LocationForecast>& forecasts, const SeasonTruths& truths,
                          int season_label, int nobs, const RunConfig& config, const std::string& model,
                          const std::vector<Scale>& scales) {
  JobResult res;
  res.season = season_label;
  res.forecast_week = nobs;
  for (const auto& f : forecasts) {
    const auto it = std::find(truths.locations.begin(), truths.locations.end(), f.location);
    if (it == truths.locations.end()) continue;
    const auto i = static_cast<std::size_t>(it - truths.locations.begin());
    if (!wanted(scales, truths.scales[i])) continue;
    score_location(res, f.location, truths.scales[i], f.targets, truths.truths[i], season_label, nobs, config,
                   model);
  }
  return res;
}

JobResult run_job(const EvaluationInputs& in, int season, int nobs, const RunConfig& config,
                  const std::string& model, int jobs) {
  const int season_label = in.states.season_labels().at(season);
  const IliPanel train = in.states.truncated(season, nobs);
  McmcConfig mcmc = config.mcmc;
  mcmc.seed = Rng::derive(config.mcmc.seed, static_cast<std::uint64_t>(season) + 1,
                          static_cast<std::uint64_t>(nobs)).engine()();
  const auto obs = Observations::from_panel(train);
  const auto draws = run_chains(obs, config.hyper, mcmc, RetainSpec{false, season}, jobs);
  const ForecastJob job{season, nobs};
  const auto states = predict_states(draws, train, job, mcmc.seed ^ 0x9e3779b97f4a7c15ULL);
  const auto regions = aggregate(states, in.weights, job, in.aggregates ? &*in.aggregates : nullptr);
  JobResult res = score_job(concat(states, regions), season_truths(in, season), season_label, nobs, config, model);
  for (const auto& p : draws.diagnostics.parameters)
    if (p.name.rfind("theta[", 0) != 0) res.diagnostics.push_back({season_label, nobs, p.name, p.rhat, p.ess});
  for (const auto& w : draws.diagnostics.warnings)
    res.warnings.push_back("season " + std::to_string(season_label) + " week " + std::to_string(nobs) + ": " + w);
  return res;
}

EvaluationResult run_loso(const ExperimentPlan& plan, const EvaluationInputs& in, const RunConfig& config, int jobs,
                          const std::function<void(const JobResult&)>& progress) {
  std::vector<std::pair<int, int>> work;
  for (int s : plan.seasons) {
    if (s < 0 || s >= in.states.S()) throw UsageError("plan season out of range");
    for (int w : plan.forecast_weeks) {
      if (w < 1 || w >= in.states.T()) throw UsageError("plan forecast week out of range");
      work.emplace_back(s, w);
    }
  }
  std::vector<JobResult> results(work.size());
  std::vector<std::exception_ptr> errors(work.size());
  std::atomic<std::size_t> next{0};
  std::mutex progress_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < work.size(); i = next++) {
      try {
        JobResult r = run_job(in, work[i].first, work[i].second, config, plan.model, 1);
        // Keep only the requested scales.
        auto drop = [&](auto& v) {
          v.erase(std::remove_if(v.begin(), v.end(),
                                 [&](const auto& rec) {
                                   return std::find(plan.scales.begin(), plan.scales.end(), rec.scale) ==
                                          plan.scales.end();
                                 }),
                  v.end());
        };
        drop(r.scores);
        drop(r.points);
        drop(r.hpd);
        if (progress) {
          std::lock_guard<std::mutex> lock(progress_mutex);
          progress(r);
        }
        results[i] = std::move(r);
      } catch (const UsageError&) {
        errors[i] = std::current_exception();
      } catch (const DataError&) {
        errors[i] = std::current_exception();
      } catch (const NumericalError& e) {
        results[i].season = in.states.season_labels()[work[i].first];
        results[i].forecast_week = work[i].second;
        results[i].warnings.push_back("season " + std::to_string(results[i].season) + " week " +
                                      std::to_string(work[i].second) + ": fit failed: " + e.what());
      }
    }
  };
  const int n_threads = std::clamp<int>(jobs, 1, std::max<int>(1, static_cast<int>(work.size())));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  EvaluationResult out;
  for (auto& r : results) {
    out.scores.insert(out.scores.end(), r.scores.begin(), r.scores.end());
    out.points.insert(out.points.end(), r.points.begin(), r.points.end());
    out.hpd.insert(out.hpd.end(), r.hpd.begin(), r.hpd.end());
    out.diagnostics.insert(out.diagnostics.end(), r.diagnostics.begin(), r.diagnostics.end());
    out.warnings.insert(out.warnings.end(), r.warnings.begin(), r.warnings.end());
  }
  out.summary = summarize(out.scores, out.points, out.hpd);
  return out;
}

std::vector<SummaryRow> summarize(const std::vector<ScoreRecord>& scores, const std::vector<PointRecord>& points,
                                  const std::vector<HpdRecord>& hpd) {
  // (metric, scale, group_by, group) -> (sum, n); skill sums floored log scores.
  std::map<std::tuple<std::string, std::string, std::string, std::string>, std::pair<double, std::size_t>> acc;
  auto add = [&](const std::string& metric, Scale scale, const std::string& location, TargetKind target, int season,
                 double v) {
    const std::string sc = scale_name(scale);
    for (const auto& [by, group] : std::initializer_list<std::pair<std::string, std::string>>{
             {"scale", sc}, {"location", location}, {"target", target_short_name(target)},
             {"season", std::to_string(season)}}) {
      auto& a = acc[{metric, sc, by, group}];
      a.first += v;
      a.second += 1;
    }
    auto& all = acc[{metric, "all", "scale", "all"}];
    all.first += v;
    all.second += 1;
  };
  for (const auto& r : scores) add("skill", r.scale, r.location, r.target, r.season, std::max(r.log_skill, kLogScoreFloor));
  for (const auto& r : points) add("mse", r.scale, r.location, r.target, r.season, r.sq_error);
  for (const auto& r : hpd) add("hpd_width", r.scale, r.location, r.target, r.season, r.width);
  std::vector<SummaryRow> rows;
  for (const auto& [key, a] : acc) {
    const auto& [metric, scale, by, group] = key;
    double v = a.first / static_cast<double>(a.second);
    if (metric == "skill") v = std::exp(v);
    rows.push_back({metric, scale, by, group, v, a.second});
  }
  return rows;
}

std::string points_csv_text(const std::vector<PointRecord>& points) {
  std::ostringstream out;
  out << kKeyHeader << ",point,truth,sq_error\n";
  for (const auto& r : points) {
    key_out(out, r);
    out << ',' << num(r.point) << ',' << num(r.truth) << ',' << num(r.sq_error) << '\n';
  }
  return out.str();
}

std::vector<PointRecord> parse_points_csv(const std::string& text) {
  const auto table = csv::parse(text);
  std::vector<PointRecord> out;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& f = table.rows[i];
    const std::string where = "mse table: line " + std::to_string(table.line_numbers[i]) + ": ";
    if (f.size() != table.header.size()) throw DataError(where + "wrong number of fields");
    const auto k = parse_key(table, f, where);
    out.push_back({k.model, k.location, k.scale, k.season, k.target, k.forecast_week,
                   parse_num(f[table.require("point", "mse table")], where),
                   parse_num(f[table.require("truth", "mse table")], where),
                   parse_num(f[table.require("sq_error", "mse table")], where)});
  }
  return out;
}

std::string hpd_csv_text(const std::vector<HpdRecord>& hpd) {
  std::ostringstream out;
  out << kKeyHeader << ",level,width\n";
  for (const auto& r : hpd) {
    key_out(out, r);
    out << ',' << num(r.level) << ',' << num(r.width) << '\n';
  }
  return out.str();
}

std::vector<HpdRecord> parse_hpd_csv(const std::string& text) {
  const auto table = csv::parse(text);
  std::vector<HpdRecord> out;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& f = table.rows[i];
    const std::string where = "hpd table: line " + std::to_string(table.line_numbers[i]) + ": ";
    if (f.size() != table.header.size()) throw DataError(where + "wrong number of fields");
    const auto k = parse_key(table, f, where);
    out.push_back({k.model, k.location, k.scale, k.season, k.target, k.forecast_week,
                   parse_num(f[table.require("level", "hpd table")], where),
                   parse_num(f[table.require("width", "hpd table")], where)});
  }
  return out;
}

std::string summary_csv_text(const std::vector<SummaryRow>& rows) {
  std::ostringstream out;
  out << "metric,scale,group_by,group,value,n\n";
  for (const auto& r : rows)
    out << r.metric << ',' << r.scale << ',' << r.group_by << ',' << r.group << ',' << num(r.value) << ',' << r.n
        << '\n';
  return out.str();
}

std::vector<SummaryRow> parse_summary_csv(const std::string& text) {
  const auto table = csv::parse(text);
  const char* what = "summary table";
  const auto c_metric = table.require("metric", what), c_scale = table.require("scale", what),
             c_by = table.require("group_by", what), c_group = table.require("group", what),
             c_value = table.require("value", what), c_n = table.require("n", what);
  std::vector<SummaryRow> out;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& f = table.rows[i];
    const std::string where = "summary table: line " + std::to_string(table.line_numbers[i]) + ": ";
    if (f.size() != table.header.size()) throw DataError(where + "wrong number of fields");
    const auto n = csv::to_long(f[c_n]);
    if (!n || *n < 0) throw DataError(where + "bad count");
    out.push_back({f[c_metric], f[c_scale], f[c_by], f[c_group], parse_num(f[c_value], where),
                   static_cast<std::size_t>(*n)});
  }
  return out;
}

std::string diagnostics_csv_text(const std::vector<DiagnosticRecord>& rows) {
  std::ostringstream out;
  out << "season,forecast_week,parameter,rhat,ess\n";
  for (const auto& r : rows)
    out << r.season << ',' << r.forecast_week << ",\"" << r.parameter << "\"," << num(r.rhat) << ',' << num(r.ess)
        << '\n';
  return out.str();
}

void emit_report(const std::filesystem::path& dir, const EvaluationResult& result, const VolatilityReport* volatility) {
  std::filesystem::create_directories(dir);
  std::ostringstream scores;
  scores << score_table_header() << '\n';
  for (const auto& r : result.scores) scores << score_row(r) << '\n';
  write_text(dir / "scores.csv", scores.str());
  write_text(dir / "mse.csv", points_csv_text(result.points));
  write_text(dir / "hpd.csv", hpd_csv_text(result.hpd));
  write_text(dir / "summary.csv", summary_csv_text(result.summary));
  write_text(dir / "diagnostics.csv", diagnostics_csv_text(result.diagnostics));
  if (volatility) write_volatility_csv(dir / "volatility.csv", *volatility);
}

}  // namespace dante
