#pragma once

#include <optional>

namespace dante {

/// Number of MMWR epidemiological weeks in a calendar year (52 or 53).
///
/// MMWR weeks run Sunday to Saturday and week 1 is the first week holding at
/// least four days of the year, so a year has one week per Wednesday.
int mmwr_weeks_in_year(int year);

struct CalendarWeek {
  int year = 0;
  int epiweek = 0;
  bool operator==(const CalendarWeek&) const = default;
};

struct SeasonWeek {
  int season_start_year = 0;
  int t = 0;  // 1-based week of season
  bool operator==(const SeasonWeek&) const = default;
};

// Maps season-relative weeks to calendar epiweeks. A season labelled by its
// starting year Y begins at epiweek `start_epiweek` of Y; t counts weeks
// elapsed since then (inclusive), so 53-week years shift late-season weeks
// one epiweek earlier.
class SeasonCalendar {
 public:
  SeasonCalendar() = default;
  SeasonCalendar(int start_epiweek, int weeks_per_season);

  int start_epiweek() const { return start_epiweek_; }
  int weeks_per_season() const { return weeks_per_season_; }

  CalendarWeek to_calendar(int season_start_year, int t) const;

  // nullopt when the epiweek falls outside the modelled window of any season.
  std::optional<SeasonWeek> to_season(int year, int epiweek) const;

 private:
  int start_epiweek_ = 40;
  int weeks_per_season_ = 35;
};

}  // namespace dante
