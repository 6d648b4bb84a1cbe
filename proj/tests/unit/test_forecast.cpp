#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "dante/epidata.hpp"
#include "dante/errors.hpp"
#include "dante/evaluation.hpp"
#include "dante/forecast.hpp"
#include "dante/sampler.hpp"

using namespace dante;

namespace {

// Summary-layout draws with constant lambda and theta(r, t) = 0.01 (r + 1) + 0.001 t.
PosteriorDraws fake_draws(Dims d, int season, int M, double lambda) {
  PosteriorDraws p;
  p.dims = d;
  p.full_state = false;
  p.theta_season = season;
  p.names = retained_names(d, {false, season});
  p.chain_id.assign(M, 0);
  p.values.assign(p.names.size() * M, 1.0);
  for (int m = 0; m < M; ++m) {
    for (int r = 0; r < d.R; ++r) p.values[m * p.width() + *p.column("lambda[" + std::to_string(r + 1) + "]")] = lambda;
    for (int r = 0; r < d.R; ++r)
      for (int t = 0; t < d.T; ++t) {
        const std::string name =
            "theta[" + std::to_string(r + 1) + "," + std::to_string(season + 1) + "," + std::to_string(t + 1) + "]";
        p.values[m * p.width() + *p.column(name)] = 0.01 * (r + 1) + 0.001 * t;
      }
  }
  return p;
}

IliPanel fake_panel(Dims d) {
  IliPanel p({"Arizona", "California", "Maine"}, {2015, 2016}, d.T);
  for (int r = 0; r < d.R; ++r)
    for (int s = 0; s < d.S; ++s)
      for (int t = 0; t < d.T; ++t) p.set(r, s, t, 0.02 + 0.001 * (r + s + t));
  return p;
}

WeightMatrix fake_weights() {
  return weights_from_populations({"Arizona", "California", "Maine"}, {9, 9, 1}, {6.4e6, 37.3e6, 1.3e6});
}

}  // namespace

TEST_SUITE("forecast") {
  TEST_CASE("scales") {
    CHECK(scale_of_location("US National") == Scale::National);
    CHECK(scale_of_location("HHS Region 10") == Scale::Region);
    CHECK(scale_of_location("Ohio") == Scale::State);
    for (Scale s : {Scale::State, Scale::Region, Scale::National}) CHECK(scale_from_name(scale_name(s)) == s);
  }

  TEST_CASE("predict_states passes observed weeks through and draws the rest") {
    const Dims d{3, 2, 8};
    const auto panel = fake_panel(d).truncated(1, 3);
    const auto draws = fake_draws(d, 1, 4000, 2000.0);
    const auto tr = predict_states(draws, panel, {1, 3}, 42);
    REQUIRE(tr.L() == 3);
    for (int r = 0; r < 3; ++r) {
      for (int t = 0; t < 3; ++t)
        for (int m = 0; m < tr.M; ++m) CHECK(tr.at(r, t, m) == panel.value(r, 1, t));
      for (int t = 3; t < 8; ++t) {
        double sum = 0.0;
        for (double y : tr.week(r, t)) sum += y;
        const double theta = 0.01 * (r + 1) + 0.001 * t;
        const double sd = std::sqrt(theta * (1 - theta) / 2001.0);
        CHECK(std::fabs(sum / tr.M - theta) < 5.0 * sd / std::sqrt(static_cast<double>(tr.M)));
      }
    }
    const auto again = predict_states(draws, panel, {1, 3}, 42);
    CHECK(again.y == tr.y);
  }

  TEST_CASE("aggregation is coherent with the weighted state sum") {
    const Dims d{3, 2, 8};
    const auto panel = fake_panel(d).truncated(0, 4);
    const auto w = fake_weights();
    const auto states = predict_states(fake_draws(d, 0, 200, 300.0), panel, {0, 4}, 7);
    const auto agg = aggregate(states, w, {0, 4});
    REQUIRE(agg.locations == w.locations);
    double worst = 0.0;
    for (int rho = 0; rho < w.P(); ++rho)
      for (int t = 4; t < d.T; ++t)
        for (int m = 0; m < states.M; ++m) {
          double sum = 0.0;
          for (int r = 0; r < w.R(); ++r)
            if (w.weight(r, rho) > 0.0) sum += w.weight(r, rho) * states.at(r, t, m);
          worst = std::max(worst, std::fabs(agg.at(rho, t, m) - sum));
        }
    CHECK(worst == 0.0);
    CHECK(agg.at(0, 5, 3) == states.at(2, 5, 3));  // Region 1 holds only Maine

    IliPanel reported(w.locations, {2015, 2016}, d.T);
    reported.set(w.national_index(), 0, 1, 0.0333);
    const auto passed = aggregate(states, w, {0, 4}, &reported);
    CHECK(passed.at(w.national_index(), 1, 0) == 0.0333);
    CHECK(passed.at(w.national_index(), 2, 0) == agg.at(w.national_index(), 2, 0));
    CHECK(passed.at(w.national_index(), 6, 0) == agg.at(w.national_index(), 6, 0));
  }

  TEST_CASE("trajectory files round-trip") {
    const Dims d{3, 2, 8};
    const auto states = predict_states(fake_draws(d, 0, 10, 300.0), fake_panel(d), {0, 2}, 1);
    const auto path = std::filesystem::temp_directory_path() / "dante_traj_test.bin";
    write_trajectories(path, states);
    const auto back = read_trajectories(path);
    CHECK(back.locations == states.locations);
    CHECK(back.scales == states.scales);
    CHECK(back.y == states.y);
    std::filesystem::resize_file(path, 40);
    CHECK_THROWS_AS(read_trajectories(path), DataError);
  }

  TEST_CASE("FluSight CSV round-trip") {
    const SeasonCalendar cal(40, 35);
    TrajectoryDraws tr({"US National", "Ohio"}, {Scale::National, Scale::State}, 35, 50);
    for (int l = 0; l < 2; ++l)
      for (int t = 0; t < 35; ++t)
        for (int m = 0; m < 50; ++m) tr.at(l, t, m) = 0.01 + 0.04 * std::exp(-0.5 * std::pow((t - 12 - m % 7) / 3.0, 2));
    std::vector<LocationForecast> f{{"US National", target_distributions(tr, 0, 7, 2.2)},
                                    {"Ohio", target_distributions(tr, 1, 7, std::nullopt)}};
    const auto text = flusight_csv_text(f, cal, 2017);
    CHECK(text.rfind("location,target,type,unit,bin_start_incl,bin_end_notincl,value\n", 0) == 0);
    CHECK(text.find("US National,Season onset,Bin,week,none,none,") != std::string::npos);
    CHECK(text.find("US National,Season peak week,Bin,week,52,53,") != std::string::npos);  // week 13 of 2017
    CHECK(text.find("Ohio,1 wk ahead,Bin,percent,13.0,100.0,") != std::string::npos);
    const auto back = parse_flusight_csv(text, cal, 2017);
    REQUIRE(back.size() == 2);
    for (int i = 0; i < 2; ++i) {
      REQUIRE(back[i].targets.size() == f[i].targets.size());
      for (std::size_t k = 0; k < f[i].targets.size(); ++k) {
        CHECK(back[i].targets[k].kind == f[i].targets[k].kind);
        CHECK(back[i].targets[k].probs == f[i].targets[k].probs);
      }
    }
    auto bad = f;
    bad[0].targets[0].probs[0] += 0.1;
    CHECK_THROWS_AS(flusight_csv_text(bad, cal, 2017), NumericalError);
  }
}
