#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "dante/epidata.hpp"
#include "dante/errors.hpp"
#include "dante/sampler.hpp"

using namespace dante;

namespace {

Observations small_obs() {
  IliPanel p({"A", "B"}, {2014, 2015}, 6);
  for (int r = 0; r < 2; ++r)
    for (int s = 0; s < 2; ++s)
      for (int t = 0; t < 6; ++t) p.set(r, s, t, 0.01 + 0.005 * t + 0.003 * r + 0.002 * s);
  p.set_missing(1, 1, 5);
  return Observations::from_panel(p);
}

McmcConfig short_config() {
  McmcConfig c;
  c.n_chains = 3;
  c.n_iterations = 1200;
  c.thin = 2;
  c.burnin_thinned = 100;
  c.seed = 99;
  return c;
}

std::vector<std::vector<double>> ar1_chains(int chains, int n, double rho, std::uint64_t seed) {
  std::mt19937_64 g(seed);
  std::normal_distribution<double> z(0.0, 1.0);
  std::vector<std::vector<double>> out(chains);
  for (auto& c : out) {
    double x = z(g);
    for (int i = 0; i < n; ++i) {
      x = rho * x + std::sqrt(1 - rho * rho) * z(g);
      c.push_back(x);
    }
  }
  return out;
}

}  // namespace

TEST_SUITE("sampler") {
  TEST_CASE("config validation") {
    McmcConfig c;
    CHECK_NOTHROW(c.validate());
    CHECK(c.retained_per_chain() == 1500);
    c.thin = 0;
    CHECK_THROWS_AS(c.validate(), UsageError);
    c = McmcConfig{};
    c.burnin_thinned = 3000;
    CHECK_THROWS_AS(c.validate(), UsageError);
    c = McmcConfig{};
    c.target_accept = 1.0;
    CHECK_THROWS_AS(c.validate(), UsageError);
  }

  TEST_CASE("runs are reproducible and independent of the thread count") {
    const auto obs = small_obs();
    const Hyperconfig h;
    const auto a = run_chains(obs, h, short_config(), {}, 1);
    const auto b = run_chains(obs, h, short_config(), {}, 3);
    CHECK(a.M() == 3 * 500);
    CHECK(a.values == b.values);
    CHECK(a.chain_id == b.chain_id);
    auto other = short_config();
    other.seed = 100;
    CHECK(run_chains(obs, h, other, {}, 2).values != a.values);
    for (double v : a.values) REQUIRE(std::isfinite(v));
    for (double acc : a.diagnostics.acceptance) {
      CHECK(acc > 0.2);
      CHECK(acc < 0.7);
    }
  }

  TEST_CASE("summary retention matches the full state") {
    const auto obs = small_obs();
    const Hyperconfig h;
    const auto full = run_chains(obs, h, short_config(), {}, 1);
    const auto part = run_chains(obs, h, short_config(), RetainSpec{false, 1}, 1);
    REQUIRE(part.M() == full.M());
    for (std::size_t m = 0; m < full.M(); m += 97) {
      const auto st = full.state(m);
      for (int r = 0; r < 2; ++r) {
        CHECK(part.lambda(m, r) == full.lambda(m, r));
        for (int t = 0; t < 6; ++t) CHECK(part.theta(m, r, 1, t) == doctest::Approx(full.theta(m, r, 1, t)));
      }
      CHECK(st.lambda[0] == full.lambda(m, 0));
    }
  }

  TEST_CASE("checkpoint round trip") {
    const auto d = run_chains(small_obs(), Hyperconfig{}, short_config(), RetainSpec{false, 0}, 1);
    const auto path = std::filesystem::temp_directory_path() / "dante_ckpt_test.bin";
    write_checkpoint(path, d);
    const auto back = read_checkpoint(path);
    CHECK(back.names == d.names);
    CHECK(back.values == d.values);
    CHECK(back.chain_id == d.chain_id);
    CHECK(back.full_state == d.full_state);
    CHECK(back.theta_season == d.theta_season);
    CHECK(back.dims.R == 2);
    std::filesystem::resize_file(path, 20);
    CHECK_THROWS_AS(read_checkpoint(path), DataError);
    CHECK_THROWS_AS(read_checkpoint(path.string() + ".missing"), DataError);
  }

  TEST_CASE("ESS of AR(1) chains") {
    for (double rho : {0.0, 0.5, 0.9}) {
      const auto chains = ar1_chains(4, 20000, rho, 5);
      const double n = 80000;
      const double expected = n * (1 - rho) / (1 + rho);
      CHECK(effective_sample_size(chains) == doctest::Approx(expected).epsilon(0.15));
      CHECK(split_rhat(chains) == doctest::Approx(1.0).epsilon(0.01));
    }
  }

  TEST_CASE("R-hat flags chains that disagree") {
    auto chains = ar1_chains(3, 2000, 0.3, 8);
    for (double& x : chains[2]) x += 3.0;
    CHECK(split_rhat(chains) > 1.5);
    CHECK(std::isnan(split_rhat({chains[0]})));
  }
}
