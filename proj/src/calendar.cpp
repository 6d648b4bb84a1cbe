#include "dante/calendar.hpp"

#include <chrono>

#include "dante/errors.hpp"

namespace dante {

int mmwr_weeks_in_year(int year) {
  namespace chr = std::chrono;
  const chr::sys_days jan1{chr::year{year} / chr::January / 1};
  const unsigned wd = chr::weekday{jan1}.c_encoding();  // 0 = Sunday
  const bool leap = chr::year{year}.is_leap();
  // 53 Wednesdays iff Jan 1 is a Wednesday, or a Tuesday in a leap year.
  if (wd == 3 || (leap && wd == 2)) return 53;
  return 52;
}

SeasonCalendar::SeasonCalendar(int start_epiweek, int weeks_per_season)
    : start_epiweek_(start_epiweek), weeks_per_season_(weeks_per_season) {
  if (start_epiweek < 1 || start_epiweek > 52)
    throw UsageError("season.start_epiweek must lie in 1..52");
  if (weeks_per_season < 2 || weeks_per_season > 52)
    throw UsageError("season.length must lie in 2..52");
}

CalendarWeek SeasonCalendar::to_calendar(int season_start_year, int t) const {
  if (t < 1 || t > weeks_per_season_)
    throw UsageError("week of season out of range");
  int week = start_epiweek_ + t - 1;
  const int first_year_weeks = mmwr_weeks_in_year(season_start_year);
  if (week <= first_year_weeks) return {season_start_year, week};
  return {season_start_year + 1, week - first_year_weeks};
}

std::optional<SeasonWeek> SeasonCalendar::to_season(int year, int epiweek) const {
  if (epiweek < 1 || epiweek > mmwr_weeks_in_year(year)) return std::nullopt;
  int start_year = year;
  int t = 0;
  if (epiweek >= start_epiweek_) {
    t = epiweek - start_epiweek_ + 1;
  } else {
    start_year = year - 1;
    t = mmwr_weeks_in_year(start_year) - start_epiweek_ + 1 + epiweek;
  }
  if (t < 1 || t > weeks_per_season_) return std::nullopt;
  return SeasonWeek{start_year, t};
}

}  // namespace dante
