#include <doctest.h>

#include <cmath>
#include <random>

#include "dante/forecast.hpp"
#include "dante/targets.hpp"

using namespace dante;

namespace {

long tenths_oracle(double pct) { return static_cast<long>(std::floor(pct * 10.0 + 0.5 + 1e-9)); }

std::optional<int> onset_oracle(const std::vector<double>& x, double baseline) {
  const int T = static_cast<int>(x.size());
  for (int t = 0; t + 2 < T; ++t) {
    bool ok = true;
    for (int k = t; k < t + 3; ++k) ok = ok && !std::isnan(x[k]) && tenths_oracle(x[k]) >= tenths_oracle(baseline);
    if (ok) return t + 1;
  }
  return std::nullopt;
}

std::vector<int> peak_oracle(const std::vector<double>& x, double& intensity) {
  long best = -1;
  for (double v : x)
    if (!std::isnan(v)) best = std::max(best, tenths_oracle(v));
  std::vector<int> weeks;
  for (std::size_t t = 0; t < x.size(); ++t)
    if (!std::isnan(x[t]) && tenths_oracle(x[t]) == best) weeks.push_back(static_cast<int>(t) + 1);
  intensity = best / 10.0;
  return weeks;
}

}  // namespace

TEST_SUITE("targets") {
  TEST_CASE("rounding and percent bins") {
    CHECK(round_tenth(5.387) == doctest::Approx(5.4));
    CHECK(tenths(5.35) == 54);
    CHECK(tenths(0.05) == 1);
    CHECK(percent_bin(2.5) == 25);
    CHECK(percent_bin(0.0) == 0);
    CHECK(percent_bin(12.94) == 129);
    CHECK(percent_bin(12.95) == 130);
    CHECK(percent_bin(13.0) == 130);
    CHECK(percent_bin(87.0) == 130);
    CHECK(percent_bin_start(130) == 13.0);
    CHECK(percent_bin_end(130) == 100.0);
    CHECK(percent_bin_end(25) == doctest::Approx(2.6));
    CHECK(bin_count(TargetKind::Onset, 35) == 36);
    CHECK(bin_count(TargetKind::PeakTiming, 35) == 35);
    CHECK(bin_count(TargetKind::Week2, 35) == 131);
  }

  TEST_CASE("target names round-trip") {
    for (TargetKind k : kAllTargets) {
      CHECK(target_from_name(target_name(k)) == k);
      CHECK(target_from_name(target_short_name(k)) == k);
    }
    CHECK(target_name(TargetKind::Week1) == "1 wk ahead");
    CHECK_FALSE(target_from_name("5 wk ahead").has_value());
  }

  TEST_CASE("onset and peak match brute-force scans on random trajectories") {
    std::mt19937_64 g(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
      std::vector<double> x(35);
      const double base = 1.0 + 2.0 * u(g);
      for (auto& v : x) {
        v = std::round((0.5 + 5.0 * u(g)) * 100.0) / 100.0;  // plenty of ties after rounding
        if (u(g) < 0.05) v = NAN;
      }
      CHECK(compute_onset(x, base) == onset_oracle(x, base));
      double intensity = 0.0;
      const auto weeks = peak_oracle(x, intensity);
      const auto p = compute_peak(x);
      CHECK(p.weeks == weeks);
      CHECK(p.intensity == doctest::Approx(intensity));
    }
  }

  TEST_CASE("onset details") {
    const double b = 2.0;
    CHECK(compute_onset(std::vector<double>{1.0, 1.95, 2.0, 2.04, 1.0}, b) == 2);  // 1.95 rounds to 2.0
    CHECK_FALSE(compute_onset(std::vector<double>{2.1, 2.2, NAN, 2.3, 2.4}, b).has_value());
    CHECK_FALSE(compute_onset(std::vector<double>{2.1, 2.2}, b).has_value());
  }

  TEST_CASE("padding floors every bin and renormalises") {
    TargetDistribution d{TargetKind::Week1, std::vector<double>(131, 0.0)};
    d.probs[40] = 1.0;
    const auto p = pad_distribution(d);
    CHECK(p.total() == doctest::Approx(1.0).epsilon(1e-14));
    const double z = 1.0 + 130 * kPercentPad;
    CHECK(p.probs[0] == doctest::Approx(kPercentPad / z));
    CHECK(p.probs[40] == doctest::Approx(1.0 / z));
    TargetDistribution w{TargetKind::Onset, std::vector<double>(36, 1.0 / 36)};
    for (double v : pad_distribution(w).probs) CHECK(v == doctest::Approx(1.0 / 36).epsilon(1e-14));
  }

  TEST_CASE("empirical distributions from hand-built trajectories") {
    TrajectoryDraws tr({"X"}, {Scale::Region}, 6, 4);
    const double traj[4][6] = {{1.0, 2.0, 2.5, 2.5, 1.0, 0.5},
                               {1.0, 1.0, 1.5, 3.0, 3.0, 2.0},
                               {1.0, 3.0, 3.0, 3.0, 1.0, 1.0},
                               {0.5, 0.5, 0.5, 0.5, 0.5, 0.5}};
    for (int m = 0; m < 4; ++m)
      for (int t = 0; t < 6; ++t) tr.at(0, t, m) = traj[m][t] / 100.0;
    const auto d = target_distributions(tr, 0, 2, 2.0, false);
    REQUIRE(d.size() == 7);
    CHECK(d[0].kind == TargetKind::Onset);
    // Onsets: week 2, none (run 4,5,6 -> week 4? 3.0,3.0,2.0 -> week 4), week 2, none.
    CHECK(d[0].probs[1] == 0.5);
    CHECK(d[0].probs[3] == 0.25);
    CHECK(d[0].probs[6] == 0.25);
    // Peak weeks: {3,4}, {4,5}, {2,3,4}, all six tied.
    const auto& pt = d[1].probs;
    CHECK(pt[0] == doctest::Approx(1.0 / 24));
    CHECK(pt[1] == doctest::Approx(1.0 / 12 + 1.0 / 24));
    CHECK(pt[2] == doctest::Approx(0.125 + 1.0 / 12 + 1.0 / 24));
    CHECK(pt[3] == doctest::Approx(0.125 + 0.125 + 1.0 / 12 + 1.0 / 24));
    CHECK(pt[4] == doctest::Approx(0.125 + 1.0 / 24));
    CHECK(d[1].total() == doctest::Approx(1.0));
    CHECK(d[2].probs[25] == 0.25);
    CHECK(d[2].probs[30] == 0.5);
    CHECK(d[2].probs[5] == 0.25);
    // 1 wk ahead after 2 observed weeks reads week 3.
    CHECK(d[3].kind == TargetKind::Week1);
    CHECK(d[3].probs[25] == 0.25);
    CHECK(d[3].probs[15] == 0.25);
    CHECK(d[3].probs[30] == 0.25);
    CHECK(d[3].probs[5] == 0.25);
    // Only weeks 3..6 exist: four short-term targets.
    CHECK(d.back().kind == TargetKind::Week4);
    CHECK(target_distributions(tr, 0, 4, std::nullopt).size() == 4);  // pt, pi, wk1, wk2
  }

  TEST_CASE("make_truth") {
    std::vector<double> x{1.0, 2.04, 2.35, 2.6, 2.6, 1.0};
    const auto t = make_truth(x, 2.0);
    CHECK(t.percent[1] == doctest::Approx(2.0));
    CHECK(t.percent[2] == doctest::Approx(2.4));
    CHECK(t.onset == 2);
    CHECK(t.peak.weeks == std::vector<int>{4, 5});
    CHECK(t.peak.intensity == doctest::Approx(2.6));
    CHECK_FALSE(make_truth(x, std::nullopt).onset.has_value());
  }
}
