#include <doctest.h>

#include "dante/calendar.hpp"
#include "dante/csv.hpp"
#include "dante/errors.hpp"

using namespace dante;

namespace {

// Days since 1970-01-01 of a proleptic Gregorian date.
long days_from_civil(long y, unsigned m, unsigned d) {
  y -= m <= 2;
  const long era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<long>(doe) - 719468;
}

// Sunday on or before 4 January starts MMWR week 1.
long week_one_start(int year) {
  const long jan4 = days_from_civil(year, 1, 4);
  const long weekday = ((jan4 % 7) + 7 + 4) % 7;  // 1970-01-01 was a Thursday; 0 = Sunday
  return jan4 - weekday;
}

}  // namespace

TEST_SUITE("calendar") {
  TEST_CASE("53-week years agree with a date-arithmetic oracle") {
    for (int y = 1990; y <= 2040; ++y) {
      const long weeks = (week_one_start(y + 1) - week_one_start(y)) / 7;
      CHECK_MESSAGE(mmwr_weeks_in_year(y) == weeks, "year " << y);
    }
    CHECK(mmwr_weeks_in_year(2014) == 53);
    CHECK(mmwr_weeks_in_year(2015) == 52);
  }

  TEST_CASE("season weeks map to epiweeks and back") {
    const SeasonCalendar cal(40, 35);
    CHECK(cal.to_calendar(2017, 1) == CalendarWeek{2017, 40});
    CHECK(cal.to_calendar(2017, 7) == CalendarWeek{2017, 46});
    CHECK(cal.to_calendar(2017, 14) == CalendarWeek{2018, 1});
    CHECK(cal.to_calendar(2014, 14) == CalendarWeek{2014, 53});
    CHECK(cal.to_calendar(2014, 15) == CalendarWeek{2015, 1});
    for (int year : {2010, 2014, 2017, 2020})
      for (int t = 1; t <= 35; ++t) {
        const auto cw = cal.to_calendar(year, t);
        const auto back = cal.to_season(cw.year, cw.epiweek);
        REQUIRE(back.has_value());
        CHECK(*back == SeasonWeek{year, t});
      }
    CHECK_FALSE(cal.to_season(2018, 30).has_value());
    CHECK_FALSE(cal.to_season(2015, 53).has_value());
    CHECK_THROWS_AS(cal.to_calendar(2017, 36), UsageError);
    CHECK_THROWS_AS(SeasonCalendar(0, 35), UsageError);
  }
}

TEST_SUITE("csv") {
  TEST_CASE("quoted fields, blank lines and CRLF") {
    const auto t = csv::parse("a,b,c\r\n1,\"x, y\",\"he said \"\"hi\"\"\"\r\n\r\n2,,NA\n");
    REQUIRE(t.header.size() == 3);
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[0][1] == "x, y");
    CHECK(t.rows[0][2] == "he said \"hi\"");
    CHECK(t.line_numbers[1] == 4);
    CHECK(t.column("c") == 2u);
    CHECK_THROWS_AS(t.require("d", "test"), DataError);
  }

  TEST_CASE("strict number parsing") {
    CHECK(csv::to_double(" 2.5 ") == 2.5);
    CHECK_FALSE(csv::to_double("2.5x").has_value());
    CHECK_FALSE(csv::to_double("NA").has_value());
    CHECK_FALSE(csv::to_double("").has_value());
    CHECK(csv::to_long("42") == 42L);
    CHECK_FALSE(csv::to_long("4.2").has_value());
  }

  TEST_CASE("format_double round-trips") {
    for (double x : {0.1, 1.0 / 3.0, 2.596, 1e-300, 123456789.125, -0.00018})
      CHECK(*csv::to_double(csv::format_double(x)) == x);
    CHECK(csv::format_double(0.5) == "0.5");
  }
}
