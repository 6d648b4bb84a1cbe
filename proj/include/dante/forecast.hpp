#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dante/calendar.hpp"
#include "dante/targets.hpp"

namespace dante {

class IliPanel;
struct WeightMatrix;
struct PosteriorDraws;

enum class Scale { State, Region, National };

std::string scale_name(Scale scale);  // state, region, national
std::optional<Scale> scale_from_name(const std::string& name);
Scale scale_of_location(const std::string& name);

struct ForecastJob {
  int season = 0;  // 0-based season index being forecast
  int nobs = 0;    // weeks observed in that season
};

// Predictive trajectories, ILI proportions laid out [location][t][m].
struct TrajectoryDraws {
  std::vector<std::string> locations;
  std::vector<Scale> scales;
  int T = 0;
  int M = 0;
  std::vector<double> y;

  TrajectoryDraws() = default;
  TrajectoryDraws(std::vector<std::string> locations, std::vector<Scale> scales, int T, int M);

  int L() const { return static_cast<int>(locations.size()); }
  std::size_t index(int loc, int t, int m) const {
    return (static_cast<std::size_t>(loc) * T + t) * M + m;
  }
  double at(int loc, int t, int m) const { return y[index(loc, t, m)]; }
  double& at(int loc, int t, int m) { return y[index(loc, t, m)]; }
  // All M draws of one location-week.
  std::span<const double> week(int loc, int t) const { return {y.data() + index(loc, t, 0), std::size_t(M)}; }
  std::optional<int> location_index(const std::string& name) const;
};

/// State trajectories: weeks t < nobs with data pass through; every other week
/// is drawn from Beta(lambda theta, lambda (1 - theta)) using the m-th draw.
TrajectoryDraws predict_states(const PosteriorDraws& draws, const IliPanel& panel,
                               const ForecastJob& job, std::uint64_t seed);

/// Bottom-up regional and national trajectories. Observed weeks pass through
/// the reported aggregate series when given and present; other weeks sum
/// w * state draw in the weight matrix's state order.
TrajectoryDraws aggregate(const TrajectoryDraws& states, const WeightMatrix& weights,
                          const ForecastJob& job, const IliPanel* observed_aggregates = nullptr);

// Binary trajectory file: magic, dimensions, names, scales, then y.
void write_trajectories(const std::filesystem::path& path, const TrajectoryDraws& draws);
TrajectoryDraws read_trajectories(const std::filesystem::path& path);

// Target distributions of one location in FluSight order.
struct LocationForecast {
  std::string location;
  std::vector<TargetDistribution> targets;
};

// FluSight submission CSV. Week bins are labelled by epiweek, so writing and
// reading need the season's calendar and starting year.
void write_flusight_csv(const std::filesystem::path& path, const std::vector<LocationForecast>& forecasts,
                        const SeasonCalendar& calendar, int season_start_year);
std::string flusight_csv_text(const std::vector<LocationForecast>& forecasts,
                              const SeasonCalendar& calendar, int season_start_year);
std::vector<LocationForecast> read_flusight_csv(const std::filesystem::path& path,
                                                const SeasonCalendar& calendar, int season_start_year);
std::vector<LocationForecast> parse_flusight_csv(const std::string& text, const SeasonCalendar& calendar,
                                                 int season_start_year);

}  // namespace dante
