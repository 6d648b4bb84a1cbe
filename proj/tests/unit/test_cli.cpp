#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "dante/cli.hpp"
#include "synth.hpp"

using namespace dante;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "dante");
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

struct Workspace {
  fs::path dir;
  explicit Workspace(const std::string& name) : dir(fs::temp_directory_path() / name) {
    fs::remove_all(dir);
    fs::create_directories(dir);
    const auto e = synth::make_extract(synth::default_states(4, 3), {2014, 2015, 2016}, 35, 11);
    std::ofstream(dir / "ilinet.csv") << e.ilinet_csv;
    std::ofstream(dir / "weights.csv") << e.weights_csv;
    std::ofstream(dir / "baselines.csv") << e.baselines_csv;
  }
  std::string operator/(const std::string& f) const { return (dir / f).string(); }
};

const std::vector<std::string> kFast{"--set", "mcmc.chains=2",    "--set", "mcmc.iterations=600",
                                     "--set", "mcmc.thin=2",      "--set", "mcmc.burnin=100"};

std::vector<std::string> with_fast(std::vector<std::string> a) {
  a.insert(a.end(), kFast.begin(), kFast.end());
  return a;
}

fs::path only_csv(const fs::path& dir) {
  fs::path found;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().extension() == ".csv") found = e.path();
  return found;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("usage errors exit 1") {
    CHECK(run({}).code == kExitUsage);
    const auto r = run({"bogus"});
    CHECK(r.code == kExitUsage);
    CHECK(run({"clean", "--no-such-flag"}).code == kExitUsage);
    Workspace w("dante_cli_usage");
    CHECK(run({"forecast", "--input", w / "ilinet.csv", "--weights", w / "weights.csv", "--out", w / "o"}).code ==
          kExitUsage);  // no --season/--nobs
    CHECK(run({"clean", "--input", w / "ilinet.csv", "--out", w / "c.csv", "--set", "mcmc.chainz=2"}).code ==
          kExitUsage);
  }

  TEST_CASE("data errors exit 2") {
    Workspace w("dante_cli_data");
    CHECK(run({"clean", "--input", w / "missing.csv", "--out", w / "c.csv"}).code == kExitData);
    std::ofstream(w.dir / "bad.csv") << "region,year,week,ili,ilitotal,total_patients\nOhio,2015,xx,1.0,1,100\n";
    const auto r = run({"clean", "--input", w / "bad.csv", "--out", w / "c.csv"});
    CHECK(r.code == kExitData);
    CHECK(r.err.find("line 2") != std::string::npos);
  }

  TEST_CASE("clean and volatility write tables") {
    Workspace w("dante_cli_clean");
    CHECK(run({"clean", "--input", w / "ilinet.csv", "--out", w / "clean.csv"}).code == kExitOk);
    CHECK(slurp(w.dir / "clean.csv").size() > 100);
    CHECK(run({"volatility", "--input", w / "ilinet.csv", "--out", w / "vol.csv"}).code == kExitOk);
    CHECK(slurp(w.dir / "vol.csv").rfind("region,season,v_rs,v_r,patient_mean\n", 0) == 0);
  }

  TEST_CASE("forecast then score, reproducibly") {
    Workspace w("dante_cli_forecast");
    const auto args = with_fast({"forecast", "--input", w / "ilinet.csv", "--weights", w / "weights.csv",
                                 "--baselines", w / "baselines.csv", "--season", "2016", "--nobs", "10"});
    auto a = args;
    a.insert(a.end(), {"--out", w / "a"});
    auto b = args;
    b.insert(b.end(), {"--out", w / "b", "--jobs", "2"});
    const auto ra = run(a);
    INFO(ra.err);
    REQUIRE(ra.code == kExitOk);
    REQUIRE(run(b).code == kExitOk);
    const auto csv = only_csv(w.dir / "a");
    REQUIRE(!csv.empty());
    CHECK(slurp(csv) == slurp(w.dir / "b" / csv.filename()));
    CHECK(slurp(w.dir / "a" / "trajectories_states.bin") == slurp(w.dir / "b" / "trajectories_states.bin"));
    const auto text = slurp(csv);
    CHECK(text.find("US National,Season onset,Bin,week,none,none,") != std::string::npos);
    CHECK(text.find("Alabama,1 wk ahead,Point,percent,") != std::string::npos);

    const auto s = run({"score", "--forecasts", csv.string(), "--nobs", "10", "--input", w / "ilinet.csv",
                        "--weights", w / "weights.csv", "--baselines", w / "baselines.csv", "--season", "2016",
                        "--out", w / "scores.csv"});
    INFO(s.err);
    REQUIRE(s.code == kExitOk);
    CHECK(s.out.find("overall,") != std::string::npos);
    const auto scores = slurp(w.dir / "scores.csv");
    CHECK(scores.find("US National") != std::string::npos);
    CHECK(scores.find("Alabama") != std::string::npos);
  }

  TEST_CASE("fit checkpoint feeds forecast") {
    Workspace w("dante_cli_fit");
    REQUIRE(run(with_fast({"fit", "--input", w / "ilinet.csv", "--weights", w / "weights.csv", "--season", "2015",
                           "--nobs", "12", "--out", w / "draws.bin"}))
                .code == kExitOk);
    const auto f = run({"forecast", "--input", w / "ilinet.csv", "--weights", w / "weights.csv", "--season",
                        "2015", "--nobs", "12", "--draws", w / "draws.bin", "--out", w / "f"});
    INFO(f.err);
    CHECK(f.code == kExitOk);
    const auto mismatch = run({"forecast", "--input", w / "ilinet.csv", "--weights", w / "weights.csv",
                               "--season", "2016", "--nobs", "12", "--draws", w / "draws.bin", "--out", w / "g"});
    CHECK(mismatch.code == kExitData);
  }
}
