#include "dante/selfcheck.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "dante/epidata.hpp"
#include "dante/scoring.hpp"
#include "dante/targets.hpp"

namespace dante {
namespace {

std::string fmt(double x, int digits = 4) {
  std::ostringstream s;
  s << std::setprecision(digits) << x;
  return s.str();
}

double mean_of(const std::vector<double>& x) { return std::accumulate(x.begin(), x.end(), 0.0) / x.size(); }

double var_of(const std::vector<double>& x) {
  const double mu = mean_of(x);
  double ss = 0.0;
  for (double v : x) ss += (v - mu) * (v - mu);
  return ss / (x.size() - 1.0);
}

CheckResult scorer_golden() {
  const std::vector<double> skills{0.27, 0.22, 0.10, 0.68, 0.99, 0.99, 0.99, 0.99, 0.99, 0.99};
  // HHS6 2014/15: baseline 3.2, onset at season week 8.
  std::vector<double> pct(35, 1.5);
  for (int t = 7; t < 20; ++t) pct[t] = 4.0;
  const auto truth = make_truth(pct, 3.2);
  const auto window = evaluation_window(TargetKind::Onset, truth, Scale::Region);
  const double overall = geometric_mean_skill(skills);
  const bool ok = truth.onset == 8 && window.size() == 10 && window.front() == 5 && window.back() == 14 &&
                  std::fabs(overall - 0.57) <= 0.005;
  return {"scorer golden (overall onset skill 0.57)", ok, "skill " + fmt(overall)};
}

CheckResult aggregation_golden() {
  const auto w = weights_from_populations({"Arizona", "California", "Hawaii", "Nevada"}, {9, 9, 9, 9},
                                          {6407774, 37320903, 1363963, 2702464});
  IliPanel states(w.states, {2017}, 1);
  const double ili[] = {3.284, 2.498, 4.341, 1.434};
  for (int r = 0; r < 4; ++r) states.set(r, 0, 0, ili[r] / 100.0);
  const auto agg = aggregate_panel(states, w);
  const double region9 = 100.0 * agg.value(*agg.region_index("HHS Region 9"), 0, 0);
  return {"aggregation golden (HHS Region 9 EW49 2017 = 2.596)", std::fabs(region9 - 2.596) <= 0.001,
          "wILI " + fmt(region9, 6)};
}

CheckResult multibin_windows() {
  auto percent_bins = [](double value) {
    std::vector<double> pct(35, 1.0);
    pct[5] = value;
    return scoring_bins(TargetKind::Week1, make_truth(pct, std::nullopt), 5);
  };
  auto range = [](int lo, int hi) {
    std::vector<int> v(hi - lo + 1);
    std::iota(v.begin(), v.end(), lo);
    return v;
  };
  bool ok = percent_bins(2.5) == range(20, 30) && percent_bins(5.4) == range(49, 59) && percent_bins(0.3) == range(0, 8);
  // Peak at epiweek 48 is season week 9; bins are 0-based weeks.
  std::vector<double> pct(35, 1.0);
  pct[8] = 6.0;
  ok = ok && scoring_bins(TargetKind::PeakTiming, make_truth(pct, std::nullopt), 5) == range(7, 9);
  return {"multibin windows", ok, ok ? "all cases exact" : "bin sets differ"};
}

CheckResult padding_bound() {
  const int T = 35;
  std::vector<double> pct(T, 1.0);
  for (int t = 9; t < 14; ++t) pct[t] = 5.0;
  const auto truth = make_truth(pct, 2.0);
  TargetDistribution onset{TargetKind::Onset, std::vector<double>(bin_count(TargetKind::Onset, T), 0.0)};
  onset.probs[30] = 1.0;
  TargetDistribution wk{TargetKind::Week1, std::vector<double>(kPercentBins, 0.0)};
  wk.probs[120] = 1.0;
  const double s_onset = std::log(*multibin_score(pad_distribution(onset), truth, 5));
  const double s_pct = std::log(*multibin_score(pad_distribution(wk), truth, 5));
  const bool ok = s_onset >= std::log(3 * kWeekPad) - 0.01 && s_pct >= std::log(11 * kPercentPad) - 0.01;
  return {"padding bound", ok, "onset " + fmt(s_onset) + ", percent " + fmt(s_pct)};
}

}  // namespace

std::vector<RecoveryMoment> prior_recovery(const Hyperconfig& hyper, Dims dims, const McmcConfig& config,
                                           int prior_draws, std::uint64_t seed, int jobs) {
  const Observations missing(dims);
  McmcConfig mc = config;
  mc.seed = seed;
  const auto draws = run_chains(missing, hyper, mc, RetainSpec{}, jobs);

  Rng rng = Rng::derive(seed, 0x9a1);
  std::vector<double> lp, aa, ab;
  for (int i = 0; i < prior_draws; ++i) {
    const auto x = sample_prior(hyper, dims, rng);
    lp.push_back(x.lambda_prec);
    aa.push_back(x.alpha_a);
    ab.push_back(x.alpha_b);
  }

  std::vector<RecoveryMoment> out;
  const std::pair<const char*, const std::vector<double>*> params[] = {
      {"lambda_prec", &lp}, {"alpha_a", &aa}, {"alpha_b", &ab}};
  for (const auto& [name, prior] : params) {
    const auto col = *draws.column(name);
    std::vector<std::vector<double>> chains(mc.n_chains);
    for (std::size_t m = 0; m < draws.M(); ++m) chains[draws.chain_id[m]].push_back(draws.row(m)[col]);
    std::vector<double> pooled;
    for (const auto& c : chains) pooled.insert(pooled.end(), c.begin(), c.end());
    RecoveryMoment r;
    r.name = name;
    r.sampler_mean = mean_of(pooled);
    r.prior_mean = mean_of(*prior);
    const double se2 = var_of(pooled) / effective_sample_size(chains) + var_of(*prior) / prior->size();
    r.z = (r.sampler_mean - r.prior_mean) / std::sqrt(se2);
    out.push_back(r);
  }
  return out;
}

std::vector<CheckResult> run_selfcheck(const Hyperconfig& hyper, const SelfcheckOptions& opt) {
  std::vector<CheckResult> out{scorer_golden(), aggregation_golden(), multibin_windows(), padding_bound()};

  McmcConfig mc;
  mc.n_chains = 2;
  mc.n_iterations = 40000;
  mc.thin = 4;
  mc.burnin_thinned = 1000;
  const auto rec = prior_recovery(hyper, Dims{2, 2, 6}, mc, 100000, opt.seed, opt.jobs);
  bool ok = true;
  std::string detail;
  for (const auto& r : rec) {
    ok = ok && std::fabs(r.z) < 4.0;
    detail += r.name + " z=" + fmt(r.z, 3) + " ";
  }
  out.push_back({"prior recovery", ok, detail});

  GewekeOptions g;
  g.seed = opt.seed;
  const auto moments = geweke_joint_test(hyper, McmcConfig{}, opt.geweke_cycles, g);
  double worst = 0.0;
  std::string worst_name;
  for (const auto& m : moments)
    if (!(std::fabs(m.z) <= worst)) {
      worst = std::fabs(m.z);
      worst_name = m.name;
    }
  out.push_back({"geweke joint test (" + std::to_string(opt.geweke_cycles) + " cycles)", worst < 4.0,
                 "max |z| " + fmt(worst, 3) + " at " + worst_name});
  return out;
}

void print_checks(std::ostream& out, const std::vector<CheckResult>& checks) {
  for (const auto& c : checks) out << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
}

}  // namespace dante
