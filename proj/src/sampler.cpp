#include "dante/sampler.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "dante/densities.hpp"
#include "dante/errors.hpp"

namespace dante {
namespace {

constexpr double kMinLogStep = -30.0;
constexpr double kMaxLogStep = 3.0;

bool excluded_from_summary(const std::string& name) {
  return name.rfind("mu_", 0) == 0 || name.rfind("var_interaction[", 0) == 0;
}

std::uint64_t chain_seed(std::uint64_t seed, int chain) {
  return Rng::derive(seed, static_cast<std::uint64_t>(chain) + 1, 0xc4a1).engine()();
}

// Flat-vector offsets of the four walk blocks and lambda.
struct Layout {
  std::size_t all, state, season, interaction, lambda;
  explicit Layout(Dims d) {
    const std::size_t R = d.R, S = d.S, T = d.T;
    all = 0;
    state = T;
    season = state + R * T;
    interaction = season + S * T;
    lambda = interaction + R * S * T;
  }
};

std::vector<std::size_t> summary_columns(Dims d) {
  const auto names = parameter_names(d);
  std::vector<std::size_t> cols;
  for (std::size_t i = 0; i < names.size(); ++i)
    if (!excluded_from_summary(names[i])) cols.push_back(i);
  return cols;
}

void append_retained(const ModelState& x, const RetainSpec& retain, const std::vector<std::size_t>& cols,
                     std::vector<double>& out) {
  const auto flat = flatten(x);
  if (retain.full_state) {
    out.insert(out.end(), flat.begin(), flat.end());
  } else {
    for (std::size_t c : cols) out.push_back(flat[c]);
  }
  if (retain.theta_season)
    for (int r = 0; r < x.dims.R; ++r)
      for (int t = 0; t < x.dims.T; ++t) out.push_back(theta_of(x, r, *retain.theta_season, t));
}

}  // namespace

void McmcConfig::validate() const {
  if (n_chains < 1) throw UsageError("mcmc.chains must be at least 1");
  if (thin < 1) throw UsageError("mcmc.thin must be at least 1");
  if (n_iterations < thin) throw UsageError("mcmc.iterations must be at least mcmc.thin");
  if (burnin_thinned < 0) throw UsageError("mcmc.burnin must be non-negative");
  if (retained_per_chain() < 1) throw UsageError("mcmc.burnin leaves no retained draws");
  if (!(target_accept > 0.0 && target_accept < 1.0)) throw UsageError("mcmc.target_accept must lie in (0, 1)");
  if (adapt_window < 1) throw UsageError("mcmc.adapt_window must be at least 1");
}

std::vector<std::string> retained_names(Dims d, const RetainSpec& retain) {
  std::vector<std::string> names;
  const auto all = parameter_names(d);
  if (retain.full_state) {
    names = all;
  } else {
    for (std::size_t c : summary_columns(d)) names.push_back(all[c]);
  }
  if (retain.theta_season) {
    const std::string s = std::to_string(*retain.theta_season + 1);
    for (int r = 0; r < d.R; ++r)
      for (int t = 0; t < d.T; ++t)
        names.push_back("theta[" + std::to_string(r + 1) + "," + s + "," + std::to_string(t + 1) + "]");
  }
  return names;
}

std::optional<std::size_t> PosteriorDraws::column(const std::string& name) const {
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) return std::nullopt;
  return static_cast<std::size_t>(it - names.begin());
}

std::vector<double> PosteriorDraws::column_values(std::size_t c) const {
  std::vector<double> out(M());
  for (std::size_t m = 0; m < M(); ++m) out[m] = values[m * width() + c];
  return out;
}

ModelState PosteriorDraws::state(std::size_t m) const {
  if (!full_state) throw UsageError("draws do not hold full states");
  return unflatten(dims, row(m).subspan(0, parameter_count(dims)));
}

double PosteriorDraws::lambda(std::size_t m, int r) const {
  // Lambda leads the scalar block in both layouts.
  const std::size_t offset = full_state ? Layout(dims).lambda : 0;
  return values[m * width() + offset + r];
}

double PosteriorDraws::theta(std::size_t m, int r, int s, int t) const {
  if (theta_season && *theta_season == s) {
    const std::size_t base = width() - static_cast<std::size_t>(dims.R) * dims.T;
    return values[m * width() + base + static_cast<std::size_t>(r) * dims.T + t];
  }
  if (!full_state) throw UsageError("draws hold theta only for the forecast season");
  const Layout L(dims);
  const double* v = values.data() + m * width();
  const std::size_t T = dims.T;
  const double pi = v[L.all + t] + v[L.state + r * T + t] + v[L.season + s * T + t] +
                    v[L.interaction + (static_cast<std::size_t>(r) * dims.S + s) * T + t];
  return inv_logit(pi);
}

GibbsEngine::GibbsEngine(ModelState initial, const Observations& obs, const Hyperconfig& hyper,
                         const McmcConfig& config, Rng& rng)
    : state_(std::move(initial)), obs_(&obs), hyper_(hyper), config_(config), rng_(rng) {
  sites_ = enumerate_sites(state_.dims);
  log_step_.assign(sites_.size(), -1.0);
  accepted_window_.assign(sites_.size(), 0);
  proposed_window_.assign(sites_.size(), 0);
  adapt_rounds_.assign(sites_.size(), 0);
  refresh_cells();
}

void GibbsEngine::reset(ModelState state, const Observations* obs) {
  state_ = std::move(state);
  if (obs) obs_ = obs;
  refresh_cells();
}

void GibbsEngine::refresh_cells() {
  const Dims d = state_.dims;
  cell_ll_.assign(d.cells(), 0.0);
  for (int r = 0; r < d.R; ++r)
    for (int s = 0; s < d.S; ++s)
      for (int t = 0; t < d.T; ++t) {
        const auto i = state_.at_rst(r, s, t);
        cell_ll_[i] = cell_log_likelihood(state_, *obs_, hyper_, r, s, t);
      }
}

double GibbsEngine::cached_log_likelihood() const {
  double sum = 0.0;
  for (double v : cell_ll_) sum += v;
  return sum;
}

double GibbsEngine::acceptance_rate() const {
  return proposed_ == 0 ? 0.0 : static_cast<double>(accepted_) / static_cast<double>(proposed_);
}

void GibbsEngine::reset_counters() {
  accepted_ = 0;
  proposed_ = 0;
}

void GibbsEngine::update_site(std::size_t i) {
  const Site& site = sites_[i];
  const bool walk = is_walk_site(site.kind);
  const bool touches_cells = walk || site.kind == SiteKind::Lambda;
  const SiteValues saved = site_values(state_, site);
  const double u = site_unconstrained(state_, site);
  const double step = std::exp(log_step_[i]);
  const double u_new = u + step * rng_.normal();

  double old_lp = local_log_prior(state_, hyper_, site);
  if (!config_.omit_jacobian) old_lp += site_log_jacobian(state_, site);
  site_set_unconstrained(state_, site, u_new);
  double new_lp = local_log_prior(state_, hyper_, site);
  if (!config_.omit_jacobian) new_lp += site_log_jacobian(state_, site);

  double delta_ll = 0.0;
  if (touches_cells && new_lp > -std::numeric_limits<double>::infinity()) {
    const Observations& obs = *obs_;
    scratch_.clear();
    for_each_cell(state_.dims, site, [&](int r, int s, int t) {
      const auto c = state_.at_rst(r, s, t);
      double ll = 0.0;
      if (obs.observed(c)) {
        const auto [a, b] = beta_args(state_.lambda[r], state_.pi(r, s, t), hyper_.beta_floor);
        ll = density::beta_from_logs(obs.log_y(c), obs.log1m_y(c), a, b);
        delta_ll += ll - cell_ll_[c];
      }
      scratch_.push_back(ll);
    });
  }

  const double log_ratio = new_lp - old_lp + delta_ll;
  const bool accept = std::log(rng_.uniform()) < log_ratio;  // false for NaN
  ++proposed_window_[i];
  ++proposed_;
  if (accept) {
    ++accepted_window_[i];
    ++accepted_;
    if (touches_cells) {
      std::size_t k = 0;
      for_each_cell(state_.dims, site, [&](int r, int s, int t) {
        const auto c = state_.at_rst(r, s, t);
        cell_ll_[c] = scratch_[k++];
      });
    }
  } else {
    site_restore(state_, site, saved);
  }
}

void GibbsEngine::update_walk_block(const Site& site) {
  // Independence proposal: a fresh walk from its prior given the current
  // scales. Prior terms cancel, leaving the likelihood ratio.
  ModelState& x = state_;
  const Dims d = x.dims;
  const int T = d.T;
  std::vector<double> proposal(T);
  double* target = nullptr;
  switch (site.kind) {
    case SiteKind::MuAll:
      target = x.mu_all.data();
      proposal[0] = rng_.normal(0.0, std::sqrt(x.var_all_init));
      for (int t = 1; t < T; ++t) proposal[t] = rng_.normal(proposal[t - 1], std::sqrt(x.var_all));
      break;
    case SiteKind::MuState:
      target = &x.mu_state[x.at_rt(site.a, 0)];
      proposal[0] = rng_.normal(0.0, std::sqrt(x.var_state_init));
      for (int t = 1; t < T; ++t) proposal[t] = rng_.normal(proposal[t - 1], std::sqrt(x.var_state[site.a]));
      break;
    case SiteKind::MuSeason:
      target = &x.mu_season[x.at_st(site.a, 0)];
      proposal[T - 1] = rng_.normal(0.0, std::sqrt(x.var_season_init));
      for (int t = T - 2; t >= 0; --t) proposal[t] = rng_.normal(proposal[t + 1], std::sqrt(x.var_season));
      break;
    case SiteKind::MuInteraction: {
      const int r = site.a;
      target = &x.mu_interaction[x.at_rst(r, site.b, 0)];
      proposal[T - 1] = rng_.normal(x.eta_interaction[r], std::sqrt(x.var_interaction[x.at_rt(r, T - 1)]));
      for (int t = T - 2; t >= 0; --t)
        proposal[t] = rng_.normal(x.alpha_interaction[r] * proposal[t + 1],
                                  std::sqrt(x.var_interaction[x.at_rt(r, t)]));
      break;
    }
    default:
      return;
  }
  std::vector<double> saved(target, target + T);
  std::copy(proposal.begin(), proposal.end(), target);

  // Cells touched by the walk.
  std::vector<std::size_t> cells;
  for (int r = 0; r < d.R; ++r)
    for (int s = 0; s < d.S; ++s) {
      bool hit = site.kind == SiteKind::MuAll || (site.kind == SiteKind::MuState && r == site.a) ||
                 (site.kind == SiteKind::MuSeason && s == site.a) ||
                 (site.kind == SiteKind::MuInteraction && r == site.a && s == site.b);
      if (hit)
        for (int t = 0; t < T; ++t) cells.push_back(x.at_rst(r, s, t));
    }
  double delta = 0.0;
  std::vector<double> new_ll(cells.size());
  for (std::size_t k = 0; k < cells.size(); ++k) {
    const auto c = cells[k];
    const int t = static_cast<int>(c % T);
    const int s = static_cast<int>((c / T) % d.S);
    const int r = static_cast<int>(c / (static_cast<std::size_t>(T) * d.S));
    new_ll[k] = cell_log_likelihood(x, *obs_, hyper_, r, s, t);
    delta += new_ll[k] - cell_ll_[c];
  }
  if (std::log(rng_.uniform()) < delta) {
    for (std::size_t k = 0; k < cells.size(); ++k) cell_ll_[cells[k]] = new_ll[k];
  } else {
    std::copy(saved.begin(), saved.end(), target);
  }
}

void GibbsEngine::sweep(bool adapt) {
  for (std::size_t i = 0; i < sites_.size(); ++i) update_site(i);
  if (config_.block_walk_updates) {
    const Dims d = state_.dims;
    update_walk_block({SiteKind::MuAll});
    for (int r = 0; r < d.R; ++r) update_walk_block({SiteKind::MuState, r});
    for (int s = 0; s < d.S; ++s) update_walk_block({SiteKind::MuSeason, s});
    for (int r = 0; r < d.R; ++r)
      for (int s = 0; s < d.S; ++s) update_walk_block({SiteKind::MuInteraction, r, s});
  }
  if (!adapt) return;
  if (proposed_window_[0] < config_.adapt_window) return;
  for (std::size_t i = 0; i < sites_.size(); ++i) {
    const double rate = static_cast<double>(accepted_window_[i]) / proposed_window_[i];
    const double gain = 1.0 / std::sqrt(static_cast<double>(++adapt_rounds_[i]));
    log_step_[i] = std::clamp(log_step_[i] + gain * (rate - config_.target_accept), kMinLogStep, kMaxLogStep);
    accepted_window_[i] = 0;
    proposed_window_[i] = 0;
  }
}

ModelState initial_state(const Observations& obs, const Hyperconfig& hyper, Rng& rng) {
  for (int attempt = 0; attempt < 100; ++attempt) {
    ModelState x = sample_prior(hyper, obs.dims(), rng);
    try {
      if (std::isfinite(log_joint(x, obs, hyper))) return x;
    } catch (const NumericalError&) {
    }
  }
  throw NumericalError("no finite initial state after 100 prior draws");
}

ChainOutput run_chain(const Observations& obs, const Hyperconfig& hyper, const McmcConfig& config,
                      std::uint64_t seed, const RetainSpec& retain) {
  config.validate();
  hyper.validate();
  if (retain.theta_season && (*retain.theta_season < 0 || *retain.theta_season >= obs.dims().S))
    throw UsageError("theta season out of range");
  Rng rng(seed);
  GibbsEngine engine(initial_state(obs, hyper, rng), obs, hyper, config, rng);
  const auto cols = summary_columns(obs.dims());
  const int burnin = config.burnin_iterations();
  ChainOutput out;
  out.values.reserve(static_cast<std::size_t>(config.retained_per_chain()) *
                     retained_names(obs.dims(), retain).size());
  for (int iter = 1; iter <= config.n_iterations; ++iter) {
    engine.sweep(iter <= burnin);
    if (iter == burnin) engine.reset_counters();
    if (iter % config.thin == 0 && iter / config.thin > config.burnin_thinned) {
      append_retained(engine.state(), retain, cols, out.values);
      ++out.rows;
    }
  }
  out.acceptance = engine.acceptance_rate();
  return out;
}

PosteriorDraws run_chains(const Observations& obs, const Hyperconfig& hyper, const McmcConfig& config,
                          const RetainSpec& retain, int jobs) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  std::vector<ChainOutput> outputs(config.n_chains);
  std::vector<std::exception_ptr> errors(config.n_chains);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int c = next++; c < config.n_chains; c = next++) {
      try {
        outputs[c] = run_chain(obs, hyper, config, chain_seed(config.seed, c), retain);
      } catch (...) {
        errors[c] = std::current_exception();
      }
    }
  };
  const int n_threads = std::clamp(jobs, 1, config.n_chains);
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  PosteriorDraws draws;
  draws.dims = obs.dims();
  draws.names = retained_names(obs.dims(), retain);
  draws.full_state = retain.full_state;
  draws.theta_season = retain.theta_season;
  for (int c = 0; c < config.n_chains; ++c) {
    draws.values.insert(draws.values.end(), outputs[c].values.begin(), outputs[c].values.end());
    draws.chain_id.insert(draws.chain_id.end(), outputs[c].rows, c);
  }
  draws.diagnostics = compute_diagnostics(draws, config.n_chains);
  for (const auto& o : outputs) draws.diagnostics.acceptance.push_back(o.acceptance);
  draws.diagnostics.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return draws;
}

}  // namespace dante
