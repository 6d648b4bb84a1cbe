#include "dante/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "dante/config.hpp"
#include "dante/csv.hpp"
#include "dante/epidata.hpp"
#include "dante/errors.hpp"
#include "dante/evaluation.hpp"
#include "dante/forecast.hpp"
#include "dante/sampler.hpp"
#include "dante/selfcheck.hpp"
#include "dante/volatility.hpp"

namespace fs = std::filesystem;

namespace dante {
namespace {

struct Options {
  std::string input, weights, baselines, config, out, draws, model = "dante";
  std::vector<std::string> forecasts, overrides;
  std::vector<int> seasons, nobs;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  int cycles = 2000;
  bool full_state = false;
};

void require_file(const std::string& path, const std::string& flag) {
  if (path.empty()) throw UsageError(flag + " is required");
  if (!fs::exists(path)) throw DataError(flag + ": no such file " + path);
}

void require_out(const std::string& path) {
  if (path.empty()) throw UsageError("--out is required");
}

RunConfig make_config(const Options& o) {
  RunConfig c;
  if (!o.config.empty()) {
    require_file(o.config, "--config");
    c = load_config(o.config);
  }
  for (const auto& kv : o.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw UsageError("--set expects key=value, got '" + kv + "'");
    apply_setting(c, std::string(csv::trim(kv.substr(0, eq))), std::string(csv::trim(kv.substr(eq + 1))));
  }
  if (o.seed) c.mcmc.seed = *o.seed;
  c.hyper.validate();
  c.mcmc.validate();
  return c;
}

bool is_aggregate(const std::string& name) { return scale_of_location(name) != Scale::State; }

// State panel (weight-matrix order when weights are given, else sorted) and
// the reported aggregate series when the input carries any.
struct Panels {
  std::vector<RawIliRow> rows;
  IliPanel states;
  std::optional<IliPanel> aggregates;
};

Panels load_panels(const std::string& input, const RunConfig& c, const WeightMatrix* weights) {
  Panels p;
  p.rows = parse_ilinet(input);
  std::set<std::string> state_names, agg_names;
  for (const auto& row : p.rows) (is_aggregate(row.region_id) ? agg_names : state_names).insert(row.region_id);
  PanelOptions so;
  if (weights) {
    so.regions = weights->states;
    for (const auto& s : so.regions)
      if (!state_names.count(s)) throw DataError("state '" + s + "' of the weights file has no rows in " + input);
  } else {
    so.regions.assign(state_names.begin(), state_names.end());
  }
  std::vector<RawIliRow> state_rows, agg_rows;
  for (const auto& row : p.rows) (is_aggregate(row.region_id) ? agg_rows : state_rows).push_back(row);
  if (!state_rows.empty()) p.states = build_panel(state_rows, c.calendar, so);
  if (!agg_rows.empty()) {
    PanelOptions ao;
    if (weights) {
      for (const auto& loc : weights->locations)
        if (agg_names.count(loc)) ao.regions.push_back(loc);
    } else {
      ao.regions.assign(agg_names.begin(), agg_names.end());
    }
    ao.seasons = p.states.season_labels();
    if (!ao.regions.empty()) p.aggregates = build_panel(agg_rows, c.calendar, ao);
  }
  return p;
}

int season_index(const IliPanel& panel, int label) {
  const auto s = panel.season_index(label);
  if (!s) throw DataError("season " + std::to_string(label) + " is not in the input");
  return *s;
}

int single(const std::vector<int>& v, const std::string& flag) {
  if (v.size() != 1) throw UsageError(flag + " takes exactly one value here");
  return v.front();
}

void check_nobs(int nobs, const RunConfig& c) {
  if (nobs < 1 || nobs >= c.calendar.weeks_per_season())
    throw UsageError("--nobs must lie in 1.." + std::to_string(c.calendar.weeks_per_season() - 1));
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot write " + path.string());
  f << text;
}

void print_warnings(std::ostream& err, const std::vector<std::string>& warnings) {
  const std::size_t shown = std::min<std::size_t>(warnings.size(), 20);
  for (std::size_t i = 0; i < shown; ++i) err << "warning: " << warnings[i] << '\n';
  if (warnings.size() > shown) err << "warning: " << warnings.size() - shown << " more R-hat warnings\n";
}

int cmd_clean(const Options& o, std::ostream& out) {
  require_file(o.input, "--input");
  require_out(o.out);
  const RunConfig c = make_config(o);
  const auto rows = parse_ilinet(o.input);
  const auto panel = build_panel(rows, c.calendar);
  std::ostringstream s;
  s << "region,season,week,year,epiweek,ili\n";
  for (int r = 0; r < panel.R(); ++r)
    for (int k = 0; k < panel.S(); ++k)
      for (int t = 0; t < panel.T(); ++t) {
        const auto cw = c.calendar.to_calendar(panel.season_labels()[k], t + 1);
        s << '"' << panel.region_names()[r] << "\"," << panel.season_labels()[k] << ',' << t + 1 << ','
          << cw.year << ',' << cw.epiweek << ','
          << (panel.present(r, k, t) ? csv::format_double(panel.value(r, k, t)) : "NA") << '\n';
      }
  write_text(o.out, s.str());
  out << "cleaned " << panel.count_present() << " of " << panel.values().size() << " cells for " << panel.R()
      << " regions and " << panel.S() << " seasons\n";
  return kExitOk;
}

int cmd_fit(const Options& o, std::ostream& out, std::ostream& err) {
  require_file(o.input, "--input");
  require_out(o.out);
  const RunConfig c = make_config(o);
  std::optional<WeightMatrix> w;
  if (!o.weights.empty()) {
    require_file(o.weights, "--weights");
    w = load_weights(o.weights);
  }
  const auto p = load_panels(o.input, c, w ? &*w : nullptr);
  if (p.states.R() == 0) throw DataError("no state rows in " + o.input);
  IliPanel train = p.states;
  RetainSpec retain{true, std::nullopt};
  if (!o.seasons.empty()) {
    const int s = season_index(train, single(o.seasons, "--season"));
    if (!o.nobs.empty()) {
      const int nobs = single(o.nobs, "--nobs");
      check_nobs(nobs, c);
      train = train.truncated(s, nobs);
    }
    retain = RetainSpec{o.full_state, s};
  } else if (!o.nobs.empty()) {
    throw UsageError("--nobs needs --season");
  }
  const auto draws = run_chains(Observations::from_panel(train), c.hyper, c.mcmc, retain, o.jobs);
  write_checkpoint(o.out, draws);
  print_warnings(err, draws.diagnostics.warnings);
  out << "wrote " << draws.M() << " draws of " << draws.width() << " columns to " << o.out << " in "
      << std::fixed << std::setprecision(1) << draws.diagnostics.seconds << " s\n";
  return kExitOk;
}

std::string submission_name(const RunConfig& c, int season_label, int nobs, const std::string& model) {
  const auto cw = c.calendar.to_calendar(season_label, nobs);
  char buf[64];
  std::snprintf(buf, sizeof buf, "EW%02d-%d-%s.csv", cw.epiweek, cw.year, model.c_str());
  return buf;
}

int cmd_forecast(const Options& o, std::ostream& out, std::ostream& err) {
  require_file(o.input, "--input");
  require_file(o.weights, "--weights");
  require_out(o.out);
  const RunConfig c = make_config(o);
  const auto w = load_weights(o.weights);
  const auto p = load_panels(o.input, c, &w);
  Baselines baselines;
  if (!o.baselines.empty()) {
    require_file(o.baselines, "--baselines");
    baselines = load_baselines(o.baselines);
  }
  if (o.seasons.empty() || o.nobs.empty()) throw UsageError("forecast needs --season and --nobs");
  const int label = single(o.seasons, "--season");
  const int nobs = single(o.nobs, "--nobs");
  check_nobs(nobs, c);
  const int s = season_index(p.states, label);
  const IliPanel train = p.states.truncated(s, nobs);

  PosteriorDraws draws;
  if (!o.draws.empty()) {
    require_file(o.draws, "--draws");
    draws = read_checkpoint(o.draws);
    const Dims d{train.R(), train.S(), train.T()};
    if (!(draws.dims == d)) throw DataError("checkpoint dimensions do not match the input panel");
    if (!draws.full_state && draws.theta_season != s)
      throw DataError("checkpoint does not hold theta for season " + std::to_string(label));
  } else {
    draws = run_chains(Observations::from_panel(train), c.hyper, c.mcmc, RetainSpec{false, s}, o.jobs);
    print_warnings(err, draws.diagnostics.warnings);
  }
  const ForecastJob job{s, nobs};
  const auto states = predict_states(draws, train, job, Rng::derive(c.mcmc.seed, 0xf0, 0).engine()());
  const auto regions = aggregate(states, w, job, p.aggregates ? &*p.aggregates : nullptr);

  std::vector<LocationForecast> forecasts;
  for (const auto* traj : {&regions, &states})
    for (int l = 0; l < traj->L(); ++l) {
      const auto baseline =
          traj->scales[l] == Scale::State ? std::nullopt : find_baseline(baselines, traj->locations[l], label);
      forecasts.push_back({traj->locations[l], target_distributions(*traj, l, nobs, baseline)});
    }
  const fs::path dir(o.out);
  fs::create_directories(dir);
  const auto csv_path = dir / submission_name(c, label, nobs, o.model);
  write_flusight_csv(csv_path, forecasts, c.calendar, label);
  write_trajectories(dir / "trajectories_states.bin", states);
  write_trajectories(dir / "trajectories_aggregates.bin", regions);
  out << "wrote forecasts for " << forecasts.size() << " locations to " << csv_path.string() << '\n';
  return kExitOk;
}

int cmd_score(const Options& o, std::ostream& out) {
  require_file(o.input, "--input");
  require_out(o.out);
  if (o.forecasts.empty()) throw UsageError("score needs at least one --forecasts file");
  if (o.forecasts.size() != o.nobs.size()) throw UsageError("give one --nobs per --forecasts file");
  const RunConfig c = make_config(o);
  std::optional<WeightMatrix> w;
  if (!o.weights.empty()) {
    require_file(o.weights, "--weights");
    w = load_weights(o.weights);
  }
  Baselines baselines;
  if (!o.baselines.empty()) {
    require_file(o.baselines, "--baselines");
    baselines = load_baselines(o.baselines);
  }
  const int label = single(o.seasons, "--season");
  const auto p = load_panels(o.input, c, w ? &*w : nullptr);

  SeasonTruths truths;
  append_truths(truths, p.states, label, false, baselines);
  if (p.aggregates)
    append_truths(truths, *p.aggregates, label, true, baselines);
  else if (w && p.states.R() > 0)
    append_truths(truths, aggregate_panel(p.states, *w), label, true, baselines);
  if (truths.locations.empty()) throw DataError("no truth for season " + std::to_string(label) + " in " + o.input);

  std::vector<ScoreRecord> scores;
  for (std::size_t i = 0; i < o.forecasts.size(); ++i) {
    require_file(o.forecasts[i], "--forecasts");
    check_nobs(o.nobs[i], c);
    const auto f = read_flusight_csv(o.forecasts[i], c.calendar, label);
    const auto r = score_forecasts(f, truths, label, o.nobs[i], c, o.model);
    scores.insert(scores.end(), r.scores.begin(), r.scores.end());
  }
  write_scores(o.out, scores);
  std::map<std::pair<std::string, std::string>, std::vector<ScoreRecord>> groups;
  for (const auto& r : scores) groups[{r.location, target_short_name(r.target)}].push_back(r);
  out << "location,target,n,skill\n";
  for (const auto& [key, recs] : groups)
    out << '"' << key.first << "\"," << key.second << ',' << recs.size() << ','
        << csv::format_double(average_scores(recs)) << '\n';
  out << "overall," << scores.size() << ',' << csv::format_double(average_scores(scores)) << '\n';
  return kExitOk;
}

int cmd_evaluate(const Options& o, std::ostream& out, std::ostream& err) {
  require_file(o.input, "--input");
  require_file(o.weights, "--weights");
  require_out(o.out);
  const RunConfig c = make_config(o);
  EvaluationInputs in{};
  in.weights = load_weights(o.weights);
  auto p = load_panels(o.input, c, &in.weights);
  in.states = std::move(p.states);
  in.aggregates = std::move(p.aggregates);
  if (!o.baselines.empty()) {
    require_file(o.baselines, "--baselines");
    in.baselines = load_baselines(o.baselines);
  }
  ExperimentPlan plan;
  plan.model = o.model;
  if (o.seasons.empty())
    for (int s = 0; s < in.states.S(); ++s) plan.seasons.push_back(s);
  else
    for (int label : o.seasons) plan.seasons.push_back(season_index(in.states, label));
  if (o.nobs.empty()) {
    for (int w = c.windows.first_week; w <= std::min(c.windows.last_week, in.states.T() - 1); ++w)
      plan.forecast_weeks.push_back(w);
  } else {
    for (int w : o.nobs) check_nobs(w, c);
    plan.forecast_weeks = o.nobs;
  }
  const std::size_t total = plan.seasons.size() * plan.forecast_weeks.size();
  std::size_t done = 0;
  const auto result = run_loso(plan, in, c, o.jobs, [&](const JobResult& r) {
    err << "[" << ++done << "/" << total << "] season " << r.season << " week " << r.forecast_week << '\n';
  });
  const auto vol = standardized_volatility(in.states, patient_means(p.rows, in.states.region_names()));
  emit_report(o.out, result, &vol);
  print_warnings(err, result.warnings);
  out << "metric,scale,value,n\n";
  for (const auto& row : result.summary)
    if (row.group_by == "scale")
      out << row.metric << ',' << row.group << ',' << csv::format_double(row.value) << ',' << row.n << '\n';
  return kExitOk;
}

int cmd_volatility(const Options& o, std::ostream& out) {
  require_file(o.input, "--input");
  require_out(o.out);
  const RunConfig c = make_config(o);
  const auto rows = parse_ilinet(o.input);
  const auto panel = build_panel(rows, c.calendar);
  const auto report = standardized_volatility(panel, patient_means(rows, panel.region_names()));
  write_volatility_csv(o.out, report);
  out << "wrote volatility for " << panel.R() << " regions to " << o.out << '\n';
  return kExitOk;
}

int cmd_selfcheck(const Options& o, std::ostream& out) {
  const RunConfig c = make_config(o);
  SelfcheckOptions so;
  so.geweke_cycles = o.cycles;
  so.seed = c.mcmc.seed;
  so.jobs = o.jobs;
  const auto checks = run_selfcheck(c.hyper, so);
  print_checks(out, checks);
  const bool ok = std::all_of(checks.begin(), checks.end(), [](const CheckResult& r) { return r.pass; });
  return ok ? kExitOk : kExitNumerical;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dante: hierarchical Bayesian influenza forecasting", "dante"};
  app.require_subcommand(1);
  Options o;
  std::uint64_t seed = 1;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "key = value config file");
    sub->add_option("--set", o.overrides, "override a config key, e.g. --set mcmc.chains=2");
    sub->add_option("--seed", seed, "random seed (default 1)");
  };
  auto* clean = app.add_subcommand("clean", "write the cleaned (region, season, week) panel as CSV");
  clean->add_option("--input", o.input, "ILINet CSV");
  clean->add_option("--out", o.out, "output CSV");
  common(clean);

  auto* fit = app.add_subcommand("fit", "fit the model and write a draw checkpoint");
  fit->add_option("--input", o.input, "ILINet CSV");
  fit->add_option("--weights", o.weights, "state,hhs_region,population CSV (selects and orders states)");
  fit->add_option("--season", o.seasons, "season start year whose theta is retained")->expected(1);
  fit->add_option("--nobs", o.nobs, "weeks observed in that season")->expected(1);
  fit->add_flag("--full-state", o.full_state, "retain every parameter");
  fit->add_option("--jobs", o.jobs, "worker threads");
  fit->add_option("--out", o.out, "checkpoint path");
  common(fit);

  auto* forecast = app.add_subcommand("forecast", "write FluSight target distributions for every location");
  forecast->add_option("--input", o.input, "ILINet CSV");
  forecast->add_option("--weights", o.weights, "state,hhs_region,population CSV");
  forecast->add_option("--baselines", o.baselines, "location,season,baseline_percent CSV");
  forecast->add_option("--season", o.seasons, "season start year")->expected(1);
  forecast->add_option("--nobs", o.nobs, "weeks observed")->expected(1);
  forecast->add_option("--draws", o.draws, "checkpoint from `fit` (otherwise fits)");
  forecast->add_option("--model", o.model, "model label used in file names");
  forecast->add_option("--jobs", o.jobs, "worker threads");
  forecast->add_option("--out", o.out, "output directory");
  common(forecast);

  auto* score = app.add_subcommand("score", "multibin log scores of FluSight CSVs against truth");
  score->add_option("--forecasts", o.forecasts, "FluSight CSV (repeatable)");
  score->add_option("--nobs", o.nobs, "weeks observed for each forecast file (repeatable)");
  score->add_option("--input", o.input, "ILINet CSV with the truth");
  score->add_option("--weights", o.weights, "weights for re-aggregating missing aggregate series");
  score->add_option("--baselines", o.baselines, "location,season,baseline_percent CSV");
  score->add_option("--season", o.seasons, "season start year")->expected(1);
  score->add_option("--model", o.model, "model label");
  score->add_option("--out", o.out, "score CSV");
  common(score);

  auto* evaluate = app.add_subcommand("evaluate", "leave-one-season-out evaluation and report");
  evaluate->add_option("--input", o.input, "ILINet CSV");
  evaluate->add_option("--weights", o.weights, "state,hhs_region,population CSV");
  evaluate->add_option("--baselines", o.baselines, "location,season,baseline_percent CSV");
  evaluate->add_option("--season", o.seasons, "season start years (default all)");
  evaluate->add_option("--nobs", o.nobs, "forecast weeks (default the evaluation window)");
  evaluate->add_option("--model", o.model, "model label");
  evaluate->add_option("--jobs", o.jobs, "concurrent fit jobs");
  evaluate->add_option("--out", o.out, "report directory");
  common(evaluate);

  auto* volatility = app.add_subcommand("volatility", "standardised volatility per region and season");
  volatility->add_option("--input", o.input, "ILINet CSV");
  volatility->add_option("--out", o.out, "output CSV");
  common(volatility);

  auto* selfcheck = app.add_subcommand("selfcheck", "golden examples, prior recovery and Geweke test");
  selfcheck->add_option("--cycles", o.cycles, "Geweke cycles");
  selfcheck->add_option("--jobs", o.jobs, "worker threads");
  common(selfcheck);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  if (!rev.empty()) rev.pop_back();
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }
  for (auto* sub : app.get_subcommands())
    if (sub->count("--seed")) o.seed = seed;
  if (o.jobs < 1) {
    err << "error: --jobs must be at least 1\n";
    return kExitUsage;
  }

  try {
    if (clean->parsed()) return cmd_clean(o, out);
    if (fit->parsed()) return cmd_fit(o, out, err);
    if (forecast->parsed()) return cmd_forecast(o, out, err);
    if (score->parsed()) return cmd_score(o, out);
    if (evaluate->parsed()) return cmd_evaluate(o, out, err);
    if (volatility->parsed()) return cmd_volatility(o, out);
    if (selfcheck->parsed()) return cmd_selfcheck(o, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const fs::filesystem_error& e) {
    err << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitUsage;
}

}  // namespace dante
