#include "dante/forecast.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "dante/csv.hpp"
#include "dante/epidata.hpp"
#include "dante/errors.hpp"
#include "dante/evaluation.hpp"
#include "dante/rng.hpp"
#include "dante/sampler.hpp"

namespace dante {
namespace {

constexpr char kMagic[8] = {'D', 'A', 'N', 'T', 'E', 'T', 'R', 'J'};
constexpr double kBetaFloor = 1e-8;

std::string one_decimal(double v) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(1) << v;
  return out.str();
}

template <typename T>
void put(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& in) {
  T v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof(T))) throw DataError("truncated trajectory file");
  return v;
}

}  // namespace

std::string scale_name(Scale scale) {
  switch (scale) {
    case Scale::State: return "state";
    case Scale::Region: return "region";
    case Scale::National: return "national";
  }
  return "state";
}

std::optional<Scale> scale_from_name(const std::string& name) {
  if (name == "state") return Scale::State;
  if (name == "region") return Scale::Region;
  if (name == "national") return Scale::National;
  return std::nullopt;
}

Scale scale_of_location(const std::string& name) {
  if (name == kNationalName) return Scale::National;
  if (name.rfind("HHS Region ", 0) == 0) return Scale::Region;
  return Scale::State;
}

TrajectoryDraws::TrajectoryDraws(std::vector<std::string> locs, std::vector<Scale> sc, int T_, int M_)
    : locations(std::move(locs)), scales(std::move(sc)), T(T_), M(M_) {
  if (scales.size() != locations.size()) throw UsageError("one scale per location required");
  y.assign(locations.size() * static_cast<std::size_t>(T) * M, 0.0);
}

std::optional<int> TrajectoryDraws::location_index(const std::string& name) const {
  for (int i = 0; i < L(); ++i)
    if (locations[i] == name) return i;
  return std::nullopt;
}

TrajectoryDraws predict_states(const PosteriorDraws& draws, const IliPanel& panel, const ForecastJob& job,
                               std::uint64_t seed) {
  const Dims d = draws.dims;
  if (panel.R() != d.R || panel.S() != d.S || panel.T() != d.T)
    throw UsageError("panel and draws have different dimensions");
  if (job.season < 0 || job.season >= d.S) throw UsageError("forecast season out of range");
  if (job.nobs < 0 || job.nobs > d.T) throw UsageError("nobs out of range");
  const int M = static_cast<int>(draws.M());
  TrajectoryDraws out(panel.region_names(), std::vector<Scale>(d.R, Scale::State), d.T, M);
  for (int r = 0; r < d.R; ++r) {
    Rng rng = Rng::derive(seed, static_cast<std::uint64_t>(r) + 1, 0x7a3);
    for (int t = 0; t < d.T; ++t) {
      if (t < job.nobs && panel.present(r, job.season, t)) {
        const double y = panel.value(r, job.season, t);
        for (int m = 0; m < M; ++m) out.at(r, t, m) = y;
        continue;
      }
      for (int m = 0; m < M; ++m) {
        const double theta = draws.theta(m, r, job.season, t);
        const double lambda = draws.lambda(m, r);
        const double a = std::max(lambda * theta, kBetaFloor);
        const double b = std::max(lambda * (1.0 - theta), kBetaFloor);
        out.at(r, t, m) = std::exp(rng.log_beta(a, b).log_x);
      }
    }
  }
  return out;
}

TrajectoryDraws aggregate(const TrajectoryDraws& states, const WeightMatrix& weights, const ForecastJob& job,
                          const IliPanel* observed) {
  validate_weights(weights);
  std::vector<int> loc_of(weights.R());
  for (int r = 0; r < weights.R(); ++r) {
    const auto i = states.location_index(weights.states[r]);
    if (!i) throw DataError("no trajectories for weighted state " + weights.states[r]);
    loc_of[r] = *i;
  }
  std::vector<Scale> scales;
  for (const auto& name : weights.locations) scales.push_back(scale_of_location(name));
  TrajectoryDraws out(weights.locations, scales, states.T, states.M);
  for (int rho = 0; rho < weights.P(); ++rho) {
    std::optional<int> obs_row;
    if (observed) obs_row = observed->region_index(weights.locations[rho]);
    for (int t = 0; t < states.T; ++t) {
      if (t < job.nobs && obs_row && observed->present(*obs_row, job.season, t)) {
        const double y = observed->value(*obs_row, job.season, t);
        for (int m = 0; m < states.M; ++m) out.at(rho, t, m) = y;
        continue;
      }
      for (int m = 0; m < states.M; ++m) {
        double sum = 0.0;
        for (int r = 0; r < weights.R(); ++r) {
          const double w = weights.weight(r, rho);
          if (w > 0.0) sum += w * states.at(loc_of[r], t, m);
        }
        out.at(rho, t, m) = sum;
      }
    }
  }
  return out;
}

void write_trajectories(const std::filesystem::path& path, const TrajectoryDraws& d) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out.write(kMagic, sizeof kMagic);
  put<std::uint32_t>(out, 1);
  put<std::int32_t>(out, d.L());
  put<std::int32_t>(out, d.T);
  put<std::int32_t>(out, d.M);
  for (int i = 0; i < d.L(); ++i) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(d.locations[i].size()));
    out.write(d.locations[i].data(), static_cast<std::streamsize>(d.locations[i].size()));
    put<std::uint8_t>(out, static_cast<std::uint8_t>(d.scales[i]));
  }
  out.write(reinterpret_cast<const char*>(d.y.data()), static_cast<std::streamsize>(d.y.size() * sizeof(double)));
  if (!out) throw DataError("failed writing " + path.string());
}

TrajectoryDraws read_trajectories(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  char magic[8];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof magic) != 0)
    throw DataError(path.string() + " is not a trajectory file");
  if (get<std::uint32_t>(in) != 1) throw DataError("unsupported trajectory file version");
  const int L = get<std::int32_t>(in), T = get<std::int32_t>(in), M = get<std::int32_t>(in);
  if (L < 0 || T < 1 || M < 1 || L > 100000) throw DataError("corrupt trajectory header");
  std::vector<std::string> names(L);
  std::vector<Scale> scales(L);
  for (int i = 0; i < L; ++i) {
    const auto len = get<std::uint32_t>(in);
    if (len > 4096) throw DataError("corrupt trajectory names");
    names[i].resize(len);
    if (!in.read(names[i].data(), len)) throw DataError("truncated trajectory file");
    const auto sc = get<std::uint8_t>(in);
    if (sc > 2) throw DataError("corrupt trajectory scale");
    scales[i] = static_cast<Scale>(sc);
  }
  TrajectoryDraws d(std::move(names), std::move(scales), T, M);
  if (!in.read(reinterpret_cast<char*>(d.y.data()), static_cast<std::streamsize>(d.y.size() * sizeof(double))))
    throw DataError("truncated trajectory file");
  return d;
}

std::string flusight_csv_text(const std::vector<LocationForecast>& forecasts, const SeasonCalendar& calendar,
                              int season_start_year) {
  std::ostringstream out;
  out << "location,target,type,unit,bin_start_incl,bin_end_notincl,value\n";
  for (const auto& f : forecasts) {
    for (const auto& d : f.targets) {
      if (std::fabs(d.total() - 1.0) > 1e-6)
        throw NumericalError("unnormalised " + target_name(d.kind) + " distribution for " + f.location);
      for (double p : d.probs)
        if (!(p >= 0.0)) throw NumericalError("negative probability in " + target_name(d.kind));
      const std::string target = target_name(d.kind);
      const bool pct = is_percent_valued(d.kind);
      const std::string unit = pct ? "percent" : "week";
      const auto point = point_prediction(d, PointEstimator::Mean);
      out << f.location << ',' << target << ",Point," << unit << ",NA,NA,";
      if (!point) {
        out << "none\n";
      } else if (pct) {
        out << csv::format_double(*point) << '\n';
      } else {
        out << calendar.to_calendar(season_start_year, static_cast<int>(*point)).epiweek << '\n';
      }
      for (int b = 0; b < d.size(); ++b) {
        out << f.location << ',' << target << ",Bin," << unit << ',';
        if (pct) {
          out << one_decimal(percent_bin_start(b)) << ',' << one_decimal(percent_bin_end(b));
        } else if (d.kind == TargetKind::Onset && b == d.none_bin()) {
          out << "none,none";
        } else {
          const int ew = calendar.to_calendar(season_start_year, b + 1).epiweek;
          out << ew << ',' << ew + 1;
        }
        out << ',' << csv::format_double(d.probs[b]) << '\n';
      }
    }
  }
  return out.str();
}

void write_flusight_csv(const std::filesystem::path& path, const std::vector<LocationForecast>& forecasts,
                        const SeasonCalendar& calendar, int season_start_year) {
  const std::string text = flusight_csv_text(forecasts, calendar, season_start_year);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
}

std::vector<LocationForecast> parse_flusight_csv(const std::string& text, const SeasonCalendar& calendar,
                                                 int season_start_year) {
  const auto table = csv::parse(text);
  const char* what = "FluSight CSV";
  const auto c_loc = table.require("location", what);
  const auto c_target = table.require("target", what);
  const auto c_type = table.require("type", what);
  const auto c_start = table.require("bin_start_incl", what);
  const auto c_value = table.require("value", what);
  const int T = calendar.weeks_per_season();

  std::vector<LocationForecast> out;
  std::map<std::string, std::size_t> loc_index;
  std::map<std::pair<std::size_t, TargetKind>, std::size_t> dist_index;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& f = table.rows[i];
    const std::string where = "FluSight CSV: line " + std::to_string(table.line_numbers[i]) + ": ";
    if (f.size() != table.header.size()) throw DataError(where + "wrong number of fields");
    if (f[c_type] == "Point") continue;
    if (f[c_type] != "Bin") throw DataError(where + "type must be Bin or Point");
    const auto kind = target_from_name(f[c_target]);
    if (!kind) throw DataError(where + "unknown target '" + f[c_target] + "'");
    auto [lit, fresh] = loc_index.emplace(f[c_loc], out.size());
    if (fresh) out.push_back({f[c_loc], {}});
    auto& forecast = out[lit->second];
    auto [dit, new_dist] = dist_index.emplace(std::make_pair(lit->second, *kind), forecast.targets.size());
    if (new_dist) {
      TargetDistribution d;
      d.kind = *kind;
      d.probs.assign(bin_count(*kind, T), 0.0);
      forecast.targets.push_back(std::move(d));
    }
    auto& dist = forecast.targets[dit->second];
    const auto value = csv::to_double(f[c_value]);
    if (!value) throw DataError(where + "bad probability");
    int bin;
    if (is_percent_valued(*kind)) {
      const auto start = csv::to_double(f[c_start]);
      if (!start) throw DataError(where + "bad bin start");
      bin = percent_bin(*start);
    } else if (f[c_start] == "none") {
      if (*kind != TargetKind::Onset) throw DataError(where + "none bin outside onset");
      bin = dist.none_bin();
    } else {
      const auto ew = csv::to_long(f[c_start]);
      if (!ew) throw DataError(where + "bad week bin");
      const int year = *ew >= calendar.start_epiweek() ? season_start_year : season_start_year + 1;
      const auto sw = calendar.to_season(year, static_cast<int>(*ew));
      if (!sw || sw->season_start_year != season_start_year) throw DataError(where + "week outside season");
      bin = sw->t - 1;
    }
    dist.probs[bin] = *value;
  }
  return out;
}

std::vector<LocationForecast> read_flusight_csv(const std::filesystem::path& path, const SeasonCalendar& calendar,
                                                int season_start_year) {
  return parse_flusight_csv(csv::read_file(path), calendar, season_start_year);
}

}  // namespace dante
