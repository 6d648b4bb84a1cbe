#include <doctest.h>

#include <cmath>
#include <limits>

#include "dante/config.hpp"
#include "dante/epidata.hpp"
#include "dante/errors.hpp"
#include "dante/volatility.hpp"

using namespace dante;

namespace {
const double kNaN = std::numeric_limits<double>::quiet_NaN();
}

TEST_SUITE("volatility") {
  TEST_CASE("rms first difference skips pairs touching a gap") {
    const std::vector<double> x{1.0, 3.0, kNaN, 4.0, 2.0, 5.0};
    // Pairs (1,3), (4,2), (2,5).
    CHECK(*rms_first_difference(x) == doctest::Approx(std::sqrt((4.0 + 4.0 + 9.0) / 3.0)));
    CHECK_FALSE(rms_first_difference(std::vector<double>{1.0, kNaN, 2.0}).has_value());
  }

  TEST_CASE("season volatility standardises first") {
    const std::vector<double> x{1.0, 2.0, 4.0, 3.0};
    // mean 2.5, sd sqrt(5/3); differences 1, 2, -1.
    const double sd = std::sqrt(5.0 / 3.0);
    CHECK(*season_volatility(x) == doctest::Approx(std::sqrt(6.0 / 3.0) / sd));
    std::vector<double> scaled;
    for (double v : x) scaled.push_back(7.0 + 0.01 * v);
    CHECK(*season_volatility(scaled) == doctest::Approx(*season_volatility(x)));
    CHECK_FALSE(season_volatility(std::vector<double>{2.0, 2.0, 2.0}).has_value());
    CHECK_FALSE(season_volatility(std::vector<double>{2.0, kNaN}).has_value());
  }

  TEST_CASE("panel report averages included seasons") {
    IliPanel p({"A", "B"}, {2014, 2015}, 4);
    const double a0[] = {1, 2, 4, 3}, a1[] = {1, 3, 1, 3}, b0[] = {5, 5, 5, 5};
    for (int t = 0; t < 4; ++t) {
      p.set(0, 0, t, a0[t]);
      p.set(0, 1, t, a1[t]);
      p.set(1, 0, t, b0[t]);
      p.set_missing(1, 1, t);
    }
    const auto rep = standardized_volatility(p, {100.0, 2000.0});
    const double v0 = *season_volatility(std::vector<double>(a0, a0 + 4));
    const double v1 = *season_volatility(std::vector<double>(a1, a1 + 4));
    CHECK(rep.season(0, 0) == doctest::Approx(v0));
    CHECK(rep.v_r[0] == doctest::Approx((v0 + v1) / 2));
    CHECK(std::isnan(rep.v_r[1]));
    CHECK(std::isnan(rep.season(1, 1)));
    CHECK_THROWS_AS(standardized_volatility(p, {1.0}), UsageError);
    const auto text = volatility_csv_text(rep);
    CHECK(text.find("NA") != std::string::npos);
  }
}

TEST_SUITE("config") {
  TEST_CASE("defaults") {
    const RunConfig c;
    CHECK(c.hyper.gamma_shape == 5.0);
    CHECK(c.hyper.gamma_rate == 5.0);
    CHECK(c.hyper.interaction_mean_prior_var == 0.05);
    CHECK(c.calendar.start_epiweek() == 40);
    CHECK(c.calendar.weeks_per_season() == 35);
    CHECK(c.windows.first_week == 5);
    CHECK(c.windows.last_week == 29);
    CHECK(c.hpd_level == 0.9);
    CHECK(c.point_estimator == PointEstimator::Mean);
  }

  TEST_CASE("parsing") {
    const auto c = parse_config(
        "# run\n"
        "mcmc.chains = 2\n"
        "\n"
        "mcmc.iterations=5000   # short\n"
        "mcmc.burnin = 100\n"
        "evaluation.point_estimator = mode\n"
        "model.gamma_rate = 2.5\n"
        "season.length = 33\n");
    CHECK(c.mcmc.n_chains == 2);
    CHECK(c.mcmc.n_iterations == 5000);
    CHECK(c.point_estimator == PointEstimator::Mode);
    CHECK(c.hyper.gamma_rate == 2.5);
    CHECK(c.calendar.weeks_per_season() == 33);
    CHECK(c.calendar.start_epiweek() == 40);
  }

  TEST_CASE("errors") {
    CHECK_THROWS_AS(parse_config("mcmc.chainz = 2\n"), UsageError);
    CHECK_THROWS_AS(parse_config("mcmc.chains 2\n"), UsageError);
    CHECK_THROWS_AS(parse_config("mcmc.chains = two\n"), UsageError);
    CHECK_THROWS_AS(parse_config("evaluation.hpd_level = 1.5\n"), UsageError);
    CHECK_THROWS_AS(parse_config("evaluation.point_estimator = median\n"), UsageError);
    try {
      parse_config("mcmc.thin = 2\nbogus = 1\n");
      FAIL("expected a throw");
    } catch (const UsageError& e) {
      CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
  }
}
