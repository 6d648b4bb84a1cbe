#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "dante/errors.hpp"
#include "dante/scoring.hpp"

using namespace dante;

namespace {

// Random distribution with distinct bin masses so any wrong bin shows up.
TargetDistribution random_dist(TargetKind kind, int n, std::uint64_t seed) {
  std::mt19937_64 g(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  TargetDistribution d{kind, std::vector<double>(n)};
  for (auto& p : d.probs) p = u(g);
  const double total = d.total();
  for (auto& p : d.probs) p /= total;
  return d;
}

// Sum over percent bins whose label lies in [lo, hi].
double sum_labels(const TargetDistribution& d, double lo, double hi) {
  double s = 0.0;
  for (int b = 0; b < d.size(); ++b) {
    const double start = percent_bin_start(b);
    if (start >= lo - 1e-9 && start <= hi + 1e-9) s += d.probs[b];
  }
  return s;
}

SeasonTruth week_truth(double value_at_6) {
  std::vector<double> pct(35, 1.0);
  pct[5] = value_at_6;
  return make_truth(pct, std::nullopt);
}

std::vector<int> range(int lo, int hi) {
  std::vector<int> v(hi - lo + 1);
  std::iota(v.begin(), v.end(), lo);
  return v;
}

}  // namespace

TEST_SUITE("scoring") {
  TEST_CASE("multibin percent windows sum exactly the named bins") {
    const auto d = random_dist(TargetKind::Week1, 131, 1);
    CHECK(*multibin_score(d, week_truth(2.5), 5) == sum_labels(d, 2.0, 3.0));
    CHECK(*multibin_score(d, week_truth(5.4), 5) == sum_labels(d, 4.9, 5.9));
    CHECK(*multibin_score(d, week_truth(0.3), 5) == sum_labels(d, 0.0, 0.8));
    CHECK(scoring_bins(TargetKind::Week1, week_truth(12.8), 5) == range(123, 130));
    CHECK(scoring_bins(TargetKind::Week1, week_truth(25.0), 5) == range(125, 130));
  }

  TEST_CASE("multibin week windows") {
    const auto d = random_dist(TargetKind::PeakTiming, 35, 2);
    std::vector<double> pct(35, 1.0);
    pct[8] = 5.0;  // epiweek 48 is season week 9
    const auto truth = make_truth(pct, std::nullopt);
    CHECK(*multibin_score(d, truth, 5) == d.probs[7] + d.probs[8] + d.probs[9]);
    pct[20] = 5.0;  // tied peak: union of both windows
    CHECK(scoring_bins(TargetKind::PeakTiming, make_truth(pct, std::nullopt), 5) ==
          std::vector<int>{7, 8, 9, 19, 20, 21});
    pct[21] = 5.0;
    CHECK(scoring_bins(TargetKind::PeakTiming, make_truth(pct, std::nullopt), 5) ==
          std::vector<int>{7, 8, 9, 19, 20, 21, 22});
    pct.assign(35, 1.0);
    pct[0] = 5.0;
    CHECK(scoring_bins(TargetKind::PeakTiming, make_truth(pct, std::nullopt), 5) == std::vector<int>{0, 1});
  }

  TEST_CASE("onset windows and the none bin") {
    std::vector<double> pct(35, 1.0);
    for (int t = 7; t < 15; ++t) pct[t] = 3.0;
    const auto truth = make_truth(pct, 2.0);
    REQUIRE(truth.onset == 8);
    CHECK(scoring_bins(TargetKind::Onset, truth, 5) == std::vector<int>{6, 7, 8});
    const auto none = make_truth(std::vector<double>(35, 1.0), 2.0);
    CHECK(scoring_bins(TargetKind::Onset, none, 5) == std::vector<int>{35});
    CHECK(scoring_bins(TargetKind::Onset, make_truth(pct, std::nullopt), 5).empty());
    auto unscorable = truth;
    unscorable.seasonal_scorable = false;
    CHECK_FALSE(multibin_score(random_dist(TargetKind::Onset, 36, 3), unscorable, 5).has_value());
  }

  TEST_CASE("log floor") {
    CHECK(floored_log(0.0) == kLogScoreFloor);
    CHECK(floored_log(1e-9) == kLogScoreFloor);
    CHECK(floored_log(0.5) == doctest::Approx(std::log(0.5)));
  }

  TEST_CASE("overall onset skill of the worked example") {
    const double skills[] = {0.27, 0.22, 0.10, 0.68, 0.99, 0.99, 0.99, 0.99, 0.99, 0.99};
    double sum_log = 0.0;
    std::vector<ScoreRecord> recs;
    for (int i = 0; i < 10; ++i) {
      sum_log += std::log(skills[i]);
      recs.push_back({"dante", "HHS Region 6", Scale::Region, 2014, TargetKind::Onset, 5 + i, skills[i],
                      floored_log(skills[i])});
    }
    CHECK(average_scores(recs) == doctest::Approx(std::exp(sum_log / 10)).epsilon(1e-14));
    CHECK(std::fabs(average_scores(recs) - 0.57) <= 0.005);
    CHECK(std::isnan(average_scores({})));
  }

  TEST_CASE("evaluation windows") {
    std::vector<double> pct(35, 1.0);
    for (int t = 7; t < 20; ++t) pct[t] = 4.0;  // above baseline on weeks 8..20
    const auto truth = make_truth(pct, 3.2);
    CHECK(evaluation_window(TargetKind::Onset, truth, Scale::Region) == range(5, 14));
    CHECK(evaluation_window(TargetKind::PeakTiming, truth, Scale::Region) == range(5, 21));
    CHECK(evaluation_window(TargetKind::PeakIntensity, truth, Scale::National) == range(5, 21));
    CHECK(evaluation_window(TargetKind::Week2, truth, Scale::Region) == range(5, 24));
    CHECK(evaluation_window(TargetKind::Onset, truth, Scale::State) == range(5, 29));
    CHECK(final_drop_below(truth) == 21);

    const auto flat = make_truth(std::vector<double>(35, 1.0), 3.2);
    CHECK(evaluation_window(TargetKind::Onset, flat, Scale::Region) == range(5, 29));
    CHECK(evaluation_window(TargetKind::Week1, flat, Scale::Region) == range(5, 29));
    CHECK_FALSE(final_drop_below(flat).has_value());

    std::vector<double> late(35, 1.0);
    for (int t = 20; t < 35; ++t) late[t] = 4.0;  // onset week 21, never drops
    const auto lt = make_truth(late, 3.2);
    CHECK(evaluation_window(TargetKind::Onset, lt, Scale::Region) == range(5, 27));
    CHECK(evaluation_window(TargetKind::PeakTiming, lt, Scale::Region) == range(5, 29));
    CHECK(evaluation_window(TargetKind::Week1, lt, Scale::Region) == range(17, 29));
  }

  TEST_CASE("score table round-trip") {
    std::vector<ScoreRecord> recs{{"dante", "US National", Scale::National, 2016, TargetKind::PeakIntensity, 9, 0.3,
                                   std::log(0.3)},
                                  {"dante", "Ohio", Scale::State, 2016, TargetKind::Week3, 10, 1e-7, -10.0}};
    std::string text = score_table_header() + "\n";
    for (const auto& r : recs) text += score_row(r) + "\n";
    const auto back = parse_scores(text);
    REQUIRE(back.size() == 2);
    CHECK(back[0].location == "US National");
    CHECK(back[0].target == TargetKind::PeakIntensity);
    CHECK(back[0].log_skill == recs[0].log_skill);
    CHECK(back[1].scale == Scale::State);
    CHECK(back[1].skill == 1e-7);
    CHECK_THROWS_AS(parse_scores("model,location\nx,y\n"), DataError);
  }

  TEST_CASE("baselines") {
    const auto b = parse_baselines("location,season,baseline_percent\nHHS Region 6,2014,3.2\nUS National,2014,2.2\n");
    CHECK(find_baseline(b, "HHS Region 6", 2014) == 3.2);
    CHECK_FALSE(find_baseline(b, "HHS Region 6", 2015).has_value());
    CHECK_THROWS_AS(parse_baselines("location,season,baseline_percent\nX,2014,abc\n"), DataError);
  }
}
