#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "dante/epidata.hpp"
#include "dante/errors.hpp"

using namespace dante;

namespace {

const char* kTableS1 =
    "region,year,week,ili,ilitotal,total_patients\n"
    "AL,2015,40,0.586,3,512\n"
    "AK,2015,40,1.2,6,500\n"
    "AZ,2015,40,NA,0,373\n"
    "AR,2015,40,NA,0,0\n";

RawIliRow row(std::optional<double> ili, std::optional<long> k, std::optional<long> n) {
  RawIliRow r;
  r.region_id = "X";
  r.year = 2015;
  r.epiweek = 40;
  r.ili_percent = ili;
  r.ilitotal = k;
  r.total_patients = n;
  return r;
}

std::string data_error(const std::string& text) {
  try {
    parse_ilinet_text(text);
  } catch (const DataError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_SUITE("epidata") {
  TEST_CASE("parsing the example rows") {
    const auto rows = parse_ilinet_text(kTableS1);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].region_id == "AL");
    CHECK(*rows[0].ili_percent == 0.586);
    CHECK(*rows[0].ilitotal == 3);
    CHECK(*rows[0].total_patients == 512);
    CHECK_FALSE(rows[2].ili_percent.has_value());
    CHECK(rows[0].counts_consistent());
    CHECK(parse_ilinet_text("region,year,week,ili,ilitotal,total_patients\n").empty());
  }

  TEST_CASE("malformed input names the line") {
    CHECK(data_error("region,year,week,ili\nAL,2015,40,1\n").find("ilitotal") != std::string::npos);
    CHECK(data_error("region,year,week,ili,ilitotal,total_patients\nAL,2015,40,1,2\n").find("line 2") !=
          std::string::npos);
    CHECK(data_error("region,year,week,ili,ilitotal,total_patients\nAL,2015,40,1,2,3\nAL,2015,60,1,2,3\n")
              .find("line 3") != std::string::npos);
    CHECK(data_error("region,year,week,ili,ilitotal,total_patients\nAL,2015,40,1,-2,3\n").find("negative") !=
          std::string::npos);
  }

  TEST_CASE("clean_row rules") {
    CHECK(*clean_row(row(0.586, 3, 512)) == doctest::Approx(0.00586));
    CHECK(*clean_row(row(std::nullopt, 0, 373)) == 0.0005);
    CHECK_FALSE(clean_row(row(std::nullopt, 0, 0)).has_value());
    CHECK_FALSE(clean_row(row(1.0, 0, 0)).has_value());
    CHECK(*clean_row(row(0.01, 0, 1000)) == 0.0005);
    CHECK(*clean_row(row(100.0, 5, 5)) < 1.0);
    CHECK_THROWS_AS(clean_row(row(1.0, 10, 5)), DataError);
  }

  TEST_CASE("panel placement, absent regions and duplicates") {
    const SeasonCalendar cal(40, 35);
    const std::string text =
        "region,year,week,ili,ilitotal,total_patients\n"
        "AL,2015,40,2.0,2,100\n"
        "AL,2016,22,3.0,3,100\n"
        "AL,2016,23,4.0,4,100\n"
        "AL,2016,41,5.0,5,100\n";
    PanelOptions opt;
    opt.regions = {"AL", "FL"};
    const auto p = build_panel(parse_ilinet_text(text), cal, opt);
    CHECK(p.R() == 2);
    CHECK(p.S() == 2);
    CHECK(p.T() == 35);
    CHECK(p.value(0, 0, 0) == doctest::Approx(0.02));
    CHECK(p.value(0, 0, 34) == doctest::Approx(0.03));  // t = 35 is EW22 after a 52-week year
    CHECK(p.value(0, 1, 1) == doctest::Approx(0.05));
    CHECK(p.count_present() == 3);
    for (int s = 0; s < 2; ++s)
      for (int t = 0; t < 35; ++t) CHECK_FALSE(p.present(1, s, t));
    CHECK_THROWS_AS(build_panel(parse_ilinet_text(text + "AL,2015,40,2.0,2,100\n"), cal, opt), DataError);
  }

  TEST_CASE("truncation hides the forecast season after nobs") {
    IliPanel p({"A"}, {2015, 2016}, 5);
    for (int s = 0; s < 2; ++s)
      for (int t = 0; t < 5; ++t) p.set(0, s, t, 0.01 * (t + 1));
    const auto q = p.truncated(1, 2);
    CHECK(q.count_present() == 7);
    CHECK(q.present(0, 1, 1));
    CHECK_FALSE(q.present(0, 1, 2));
    CHECK(q.present(0, 0, 4));
  }

  TEST_CASE("census weights") {
    const auto w = weights_from_populations({"Arizona", "California", "Hawaii", "Nevada", "Maine"}, {9, 9, 9, 9, 1},
                                            {6407774, 37320903, 1363963, 2702464, 1328361});
    REQUIRE(w.locations == std::vector<std::string>{"HHS Region 1", "HHS Region 9", "US National"});
    const int r9 = *w.location_index("HHS Region 9");
    CHECK(w.weight(0, r9) == doctest::Approx(0.134).epsilon(0.004));
    CHECK(w.weight(1, r9) == doctest::Approx(0.781).epsilon(0.001));
    CHECK(w.weight(2, r9) == doctest::Approx(0.029).epsilon(0.02));
    CHECK(w.weight(3, r9) == doctest::Approx(0.057).epsilon(0.01));
    CHECK(w.weight(4, 0) == 1.0);
    CHECK_FALSE(w.member(4, r9));
    CHECK_NOTHROW(validate_weights(w, 1e-12));
    CHECK_THROWS_AS(weights_from_populations({"A"}, {1}, {0.0}), DataError);

    const auto dir = std::filesystem::temp_directory_path() / "dante_weights_test";
    std::filesystem::create_directories(dir);
    std::ofstream(dir / "w.csv") << "state,hhs_region,population\nA,1,10\nB,1,0\n";
    CHECK_THROWS_AS(load_weights(dir / "w.csv"), DataError);
    std::ofstream(dir / "w.csv") << "state,hhs_region,population\nA,1,10\nB,2,30\n";
    const auto lw = load_weights(dir / "w.csv");
    CHECK(lw.weight(1, lw.national_index()) == 0.75);
  }

  TEST_CASE("aggregation reproduces Region 9 EW49 2017") {
    const double pops[] = {6407774, 37320903, 1363963, 2702464};
    const double ili[] = {3.284, 2.498, 4.341, 1.434};
    double num = 0.0, den = 0.0;
    for (int i = 0; i < 4; ++i) {
      num += pops[i] * ili[i];
      den += pops[i];
    }
    const auto w = weights_from_populations({"AZ", "CA", "HI", "NV"}, {9, 9, 9, 9}, {pops, pops + 4});
    IliPanel states(w.states, {2017}, 1);
    for (int r = 0; r < 4; ++r) states.set(r, 0, 0, ili[r] / 100.0);
    const auto agg = aggregate_panel(states, w);
    const double got = 100.0 * agg.value(0, 0, 0);
    CHECK(got == doctest::Approx(num / den).epsilon(1e-12));
    CHECK(std::fabs(got - 2.596) <= 0.001);

    states.set_missing(1, 0, 0);  // drop California: remaining weights renormalise
    const double expect = (pops[0] * ili[0] + pops[2] * ili[2] + pops[3] * ili[3]) / (pops[0] + pops[2] + pops[3]);
    CHECK(100.0 * aggregate_panel(states, w).value(0, 0, 0) == doctest::Approx(expect).epsilon(1e-12));
  }

  TEST_CASE("seasonal targets are unscorable when a gap falls in the buffered peak window") {
    IliPanel p({"DC", "PR"}, {2013, 2014, 2015}, 35);
    for (int r = 0; r < 2; ++r)
      for (int s = 0; s < 3; ++s)
        for (int t = 0; t < 35; ++t) p.set(r, s, t, 0.01 + 0.03 * std::exp(-0.5 * std::pow((t + 1 - 15 - s) / 3.0, 2)));
    const auto h = peak_history(p);
    CHECK(h.min_peak_week[0] == 15);
    CHECK(h.max_peak_week[0] == 17);
    p.set_missing(0, 2, 30);  // outside [12, 20]
    p.set_missing(1, 0, 12);  // week 13, inside
    const auto ok = scorable_seasonal_targets(p, peak_history(p));
    CHECK(ok[0][2]);
    CHECK_FALSE(ok[1][0]);
    CHECK(ok[1][1]);
    IliPanel empty({"X"}, {2015}, 35);
    CHECK_FALSE(scorable_seasonal_targets(empty, peak_history(empty))[0][0]);
  }

  TEST_CASE("patient means") {
    const auto rows = parse_ilinet_text(kTableS1);
    const auto m = patient_means(rows, {"AL", "AZ", "ZZ"});
    CHECK(m[0] == 512.0);
    CHECK(m[1] == 373.0);
    CHECK(std::isnan(m[2]));
  }
}
