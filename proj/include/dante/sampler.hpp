#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dante/conditionals.hpp"
#include "dante/model.hpp"

namespace dante {

struct McmcConfig {
  int n_chains = 3;
  int n_iterations = 30000;  // per chain, burn-in included
  int thin = 10;
  int burnin_thinned = 1500;  // thinned draws discarded from each chain
  std::uint64_t seed = 1;
  double target_accept = 0.44;
  int adapt_window = 50;  // iterations between step-size updates during burn-in
  bool block_walk_updates = false;
  bool omit_jacobian = false;  // deliberately wrong sampler, for testing the tests

  int burnin_iterations() const { return burnin_thinned * thin; }
  int retained_per_chain() const { return n_iterations / thin - burnin_thinned; }
  void validate() const;
};

// Which columns a run keeps. A full state is large for national-size panels,
// so forecasting runs keep the scalars, lambda and the theta surface of the
// forecast season instead.
struct RetainSpec {
  bool full_state = true;
  std::optional<int> theta_season;  // adds theta[r,t] columns for this season
};

struct ParameterDiagnostic {
  std::string name;
  double rhat = 0.0;  // NaN with a single chain
  double ess = 0.0;
};

struct Diagnostics {
  std::vector<ParameterDiagnostic> parameters;
  std::vector<std::string> warnings;
  std::vector<double> acceptance;  // per chain, post burn-in mean over sites
  double seconds = 0.0;
};

// Pooled retained draws, row-major [m][column].
struct PosteriorDraws {
  Dims dims;
  std::vector<std::string> names;
  std::vector<double> values;
  std::vector<int> chain_id;
  Diagnostics diagnostics;
  bool full_state = true;
  std::optional<int> theta_season;

  std::size_t width() const { return names.size(); }
  std::size_t M() const { return chain_id.size(); }
  std::span<const double> row(std::size_t m) const { return {values.data() + m * width(), width()}; }
  std::optional<std::size_t> column(const std::string& name) const;
  std::vector<double> column_values(std::size_t c) const;

  ModelState state(std::size_t m) const;  // full-state draws only
  double lambda(std::size_t m, int r) const;
  double theta(std::size_t m, int r, int s, int t) const;
};

/// Column layout for a retention choice.
std::vector<std::string> retained_names(Dims dims, const RetainSpec& retain);

// Per-chain Markov kernel. Owns the current state and caches the
// log-likelihood of every cell.
class GibbsEngine {
 public:
  GibbsEngine(ModelState initial, const Observations& obs, const Hyperconfig& hyper,
              const McmcConfig& config, Rng& rng);

  // One pass over every site; adapts step sizes when `adapt` is set.
  void sweep(bool adapt);
  // Rebuilds the caches after the state or the data changed externally.
  void reset(ModelState state, const Observations* obs = nullptr);

  const ModelState& state() const { return state_; }
  double acceptance_rate() const;  // since the last call to reset_counters
  void reset_counters();
  const std::vector<double>& log_steps() const { return log_step_; }
  void set_log_steps(std::vector<double> steps) { log_step_ = std::move(steps); }
  double cached_log_likelihood() const;

 private:
  void update_site(std::size_t i);
  void update_walk_block(const Site& site);
  void refresh_cells();

  ModelState state_;
  const Observations* obs_;
  Hyperconfig hyper_;
  McmcConfig config_;
  Rng& rng_;
  std::vector<Site> sites_;
  std::vector<double> log_step_;
  std::vector<int> accepted_window_;
  std::vector<int> proposed_window_;
  std::vector<int> adapt_rounds_;
  std::vector<double> cell_ll_;
  long accepted_ = 0;
  long proposed_ = 0;
  std::vector<double> scratch_;
};

/// Draws an initial state from the prior with finite joint density; throws
/// NumericalError after 100 failed attempts.
ModelState initial_state(const Observations& obs, const Hyperconfig& hyper, Rng& rng);

struct ChainOutput {
  std::vector<double> values;  // row-major retained draws
  std::size_t rows = 0;
  double acceptance = 0.0;
};

ChainOutput run_chain(const Observations& obs, const Hyperconfig& hyper, const McmcConfig& config,
                      std::uint64_t chain_seed, const RetainSpec& retain = {});

/// Runs config.n_chains chains on up to `jobs` threads, pools them in chain
/// order and computes split R-hat and ESS per column.
PosteriorDraws run_chains(const Observations& obs, const Hyperconfig& hyper, const McmcConfig& config,
                          const RetainSpec& retain = {}, int jobs = 1);

// Split R-hat over chains of equal length; NaN with fewer than two chains.
double split_rhat(const std::vector<std::vector<double>>& chains);
// Multi-chain effective sample size with Geyer's initial monotone sequence.
double effective_sample_size(const std::vector<std::vector<double>>& chains);
Diagnostics compute_diagnostics(const PosteriorDraws& draws, int n_chains, double rhat_threshold = 1.1);

struct GewekeMoment {
  std::string name;
  double marginal_mean = 0.0;
  double successive_mean = 0.0;
  double z = 0.0;
};

struct GewekeOptions {
  Dims dims{2, 2, 6};
  int sweeps_per_cycle = 10;
  int tuning_sweeps = 4000;
  std::uint64_t seed = 1;
};

/// Marginal-conditional versus successive-conditional simulation of the joint
/// (parameters, data); one z-score per tested moment. Empty for zero cycles.
std::vector<GewekeMoment> geweke_joint_test(const Hyperconfig& hyper, const McmcConfig& config, int n_cycles,
                                            const GewekeOptions& options = {});

// Checkpoint: flat named draws with chain ids.
void write_checkpoint(const std::filesystem::path& path, const PosteriorDraws& draws);
PosteriorDraws read_checkpoint(const std::filesystem::path& path);

}  // namespace dante
