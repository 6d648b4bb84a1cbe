#include "dante/model.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "dante/densities.hpp"
#include "dante/epidata.hpp"
#include "dante/errors.hpp"

namespace dante {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

bool positive(double x) { return x > 0.0 && std::isfinite(x); }

bool all_positive(const std::vector<double>& v) {
  for (double x : v)
    if (!positive(x)) return false;
  return true;
}

bool all_finite(const std::vector<double>& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

// Largest double below one; Beta draws that round up to 1 are pulled back here.
constexpr double kBelowOne = 1.0 - 0x1.0p-53;

}  // namespace

void Hyperconfig::validate() const {
  if (!(gamma_shape > 0 && gamma_rate > 0 && t_dof > 0 && interaction_mean_prior_var > 0 &&
        beta_floor > 0))
    throw UsageError("model hyperparameters must be strictly positive");
}

ModelState ModelState::zeros(Dims d) {
  ModelState s;
  s.dims = d;
  s.mu_all.assign(d.T, 0.0);
  s.mu_state.assign(static_cast<std::size_t>(d.R) * d.T, 0.0);
  s.mu_season.assign(static_cast<std::size_t>(d.S) * d.T, 0.0);
  s.mu_interaction.assign(d.cells(), 0.0);
  s.lambda.assign(d.R, 1.0);
  s.var_state.assign(d.R, 1.0);
  s.eta_interaction.assign(d.R, 0.0);
  s.alpha_interaction.assign(d.R, 0.5);
  s.var_interaction.assign(static_cast<std::size_t>(d.R) * d.T, 1.0);
  return s;
}

bool ModelState::in_support() const {
  const std::size_t R = dims.R, S = dims.S, T = dims.T;
  if (mu_all.size() != T || mu_state.size() != R * T || mu_season.size() != S * T ||
      mu_interaction.size() != R * S * T || lambda.size() != R || var_state.size() != R ||
      eta_interaction.size() != R || alpha_interaction.size() != R ||
      var_interaction.size() != R * T)
    return false;
  if (!all_finite(mu_all) || !all_finite(mu_state) || !all_finite(mu_season) ||
      !all_finite(mu_interaction) || !all_finite(eta_interaction))
    return false;
  if (!all_positive(lambda) || !all_positive(var_state) || !all_positive(var_interaction))
    return false;
  for (double a : alpha_interaction)
    if (!(a > 0.0 && a < 1.0)) return false;
  for (double x : {lambda_prec, var_all_init, var_all, prec_all_init, prec_all, var_state_init,
                   prec_state_init, prec_state, var_season_init, var_season, prec_season,
                   var_interaction_mean, alpha_a, alpha_b, prec_interaction})
    if (!positive(x)) return false;
  return var_season <= var_season_init;
}

double inv_logit(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double logit(double p) { return std::log(p) - std::log1p(-p); }

double theta_of(const ModelState& state, int r, int s, int t) {
  return inv_logit(state.pi(r, s, t));
}

BetaArgs beta_args(double lambda, double pi, double floor) {
  const double a = lambda * inv_logit(pi);
  const double b = lambda * inv_logit(-pi);
  return {a > floor ? a : floor, b > floor ? b : floor};
}

Observations::Observations(Dims dims)
    : dims_(dims),
      observed_(dims.cells(), 0),
      log_y_(dims.cells(), 0.0),
      log1m_y_(dims.cells(), 0.0) {}

Observations Observations::from_panel(const IliPanel& panel) {
  Observations obs(Dims{panel.R(), panel.S(), panel.T()});
  for (int r = 0; r < panel.R(); ++r)
    for (int s = 0; s < panel.S(); ++s)
      for (int t = 0; t < panel.T(); ++t)
        if (panel.present(r, s, t)) obs.set(r, s, t, panel.value(r, s, t));
  return obs;
}

void Observations::set(int r, int s, int t, double y) {
  if (!(y > 0.0 && y < 1.0)) throw DataError("observation must lie strictly inside (0, 1)");
  set_logs(r, s, t, std::log(y), std::log1p(-y));
}

void Observations::set_logs(int r, int s, int t, double log_y, double log1m_y) {
  const auto i = index(r, s, t);
  observed_[i] = 1;
  log_y_[i] = log_y;
  log1m_y_[i] = log1m_y;
}

void Observations::set_missing(int r, int s, int t) {
  const auto i = index(r, s, t);
  observed_[i] = 0;
  log_y_[i] = 0.0;
  log1m_y_[i] = 0.0;
}

std::size_t Observations::count_observed() const {
  std::size_t n = 0;
  for (auto o : observed_) n += o;
  return n;
}

double log_likelihood(const ModelState& state, const Observations& obs, const Hyperconfig& hyper) {
  const Dims d = state.dims;
  if (!(obs.dims() == d)) throw UsageError("observation and state dimensions differ");
  double total = 0.0;
  for (int r = 0; r < d.R; ++r)
    for (int s = 0; s < d.S; ++s)
      for (int t = 0; t < d.T; ++t) {
        const auto i = obs.index(r, s, t);
        if (!obs.observed(i)) continue;
        const auto [a, b] = beta_args(state.lambda[r], state.pi(r, s, t), hyper.beta_floor);
        const double term = density::beta_from_logs(obs.log_y(i), obs.log1m_y(i), a, b);
        if (!std::isfinite(term)) {
          std::ostringstream msg;
          msg << "non-finite likelihood term at state " << r + 1 << ", season " << s + 1
              << ", week " << t + 1;
          throw NumericalError(msg.str());
        }
        total += term;
      }
  return total;
}

double log_prior(const ModelState& x, const Hyperconfig& h) {
  if (!x.in_support()) return kNegInf;
  const Dims d = x.dims;
  const double k = h.t_dof;
  auto gamma = [&](double v) { return density::gamma(v, h.gamma_shape, h.gamma_rate); };
  double lp = 0.0;

  // Data-model precisions.
  for (int r = 0; r < d.R; ++r) lp += density::half_t(x.lambda[r], x.lambda_prec, k);
  lp += gamma(x.lambda_prec);

  // Common random walk.
  lp += density::normal(x.mu_all[0], 0.0, x.var_all_init);
  for (int t = 1; t < d.T; ++t) lp += density::normal(x.mu_all[t], x.mu_all[t - 1], x.var_all);
  lp += density::half_normal(x.var_all_init, x.prec_all_init) + gamma(x.prec_all_init);
  lp += density::half_normal(x.var_all, x.prec_all) + gamma(x.prec_all);

  // State random walks.
  for (int r = 0; r < d.R; ++r) {
    lp += density::normal(x.mu_state[x.at_rt(r, 0)], 0.0, x.var_state_init);
    for (int t = 1; t < d.T; ++t)
      lp += density::normal(x.mu_state[x.at_rt(r, t)], x.mu_state[x.at_rt(r, t - 1)],
                            x.var_state[r]);
    lp += density::half_t(x.var_state[r], x.prec_state, k);
  }
  lp += gamma(x.prec_state);
  lp += density::half_normal(x.var_state_init, x.prec_state_init) + gamma(x.prec_state_init);

  // Season reverse random walks.
  const int last = d.T - 1;
  for (int s = 0; s < d.S; ++s) {
    lp += density::normal(x.mu_season[x.at_st(s, last)], 0.0, x.var_season_init);
    for (int t = last - 1; t >= 0; --t)
      lp += density::normal(x.mu_season[x.at_st(s, t)], x.mu_season[x.at_st(s, t + 1)],
                            x.var_season);
  }
  lp += density::half_t(x.var_season_init, x.prec_season, k);
  lp += density::truncated_t(x.var_season, x.prec_season, k, x.var_season_init);
  lp += gamma(x.prec_season);

  // Interaction hierarchical reverse random walks with shrinkage.
  for (int r = 0; r < d.R; ++r) {
    const double alpha = x.alpha_interaction[r];
    for (int s = 0; s < d.S; ++s) {
      lp += density::normal(x.mu_interaction[x.at_rst(r, s, last)], x.eta_interaction[r],
                            x.var_interaction[x.at_rt(r, last)]);
      for (int t = last - 1; t >= 0; --t)
        lp += density::normal(x.mu_interaction[x.at_rst(r, s, t)],
                              alpha * x.mu_interaction[x.at_rst(r, s, t + 1)],
                              x.var_interaction[x.at_rt(r, t)]);
    }
    lp += density::normal(x.eta_interaction[r], 0.0, x.var_interaction_mean);
    lp += density::beta(alpha, x.alpha_a, x.alpha_b);
    for (int t = 0; t < d.T; ++t)
      lp += density::half_t(x.var_interaction[x.at_rt(r, t)], x.prec_interaction, k);
  }
  lp += density::half_normal(x.var_interaction_mean, 1.0 / h.interaction_mean_prior_var);
  lp += gamma(x.alpha_a) + gamma(x.alpha_b) + gamma(x.prec_interaction);
  return std::isnan(lp) ? kNegInf : lp;
}

double log_joint(const ModelState& state, const Observations& obs, const Hyperconfig& hyper) {
  const double lp = log_prior(state, hyper);
  if (lp == kNegInf) return kNegInf;
  return lp + log_likelihood(state, obs, hyper);
}

ModelState sample_prior(const Hyperconfig& h, Dims d, Rng& rng, const PriorPins& pins) {
  h.validate();
  if (d.R < 1 || d.S < 1 || d.T < 2) throw UsageError("model needs R >= 1, S >= 1, T >= 2");
  ModelState x = ModelState::zeros(d);
  const double k = h.t_dof;
  auto gamma = [&] { return rng.gamma(h.gamma_shape, h.gamma_rate); };
  const int last = d.T - 1;

  x.lambda_prec = gamma();
  for (int r = 0; r < d.R; ++r) x.lambda[r] = rng.half_t(x.lambda_prec, k);

  x.prec_all_init = gamma();
  x.prec_all = gamma();
  x.var_all_init = rng.half_normal(x.prec_all_init);
  x.var_all = rng.half_normal(x.prec_all);
  x.mu_all[0] = rng.normal(0.0, std::sqrt(x.var_all_init));
  for (int t = 1; t < d.T; ++t) x.mu_all[t] = rng.normal(x.mu_all[t - 1], std::sqrt(x.var_all));

  x.prec_state_init = gamma();
  x.var_state_init = rng.half_normal(x.prec_state_init);
  x.prec_state = gamma();
  for (int r = 0; r < d.R; ++r) {
    x.var_state[r] = rng.half_t(x.prec_state, k);
    x.mu_state[x.at_rt(r, 0)] = rng.normal(0.0, std::sqrt(x.var_state_init));
    for (int t = 1; t < d.T; ++t)
      x.mu_state[x.at_rt(r, t)] = rng.normal(x.mu_state[x.at_rt(r, t - 1)], std::sqrt(x.var_state[r]));
  }

  x.prec_season = gamma();
  x.var_season_init = rng.half_t(x.prec_season, k);
  x.var_season = rng.truncated_t(x.prec_season, k, x.var_season_init);
  for (int s = 0; s < d.S; ++s) {
    x.mu_season[x.at_st(s, last)] = rng.normal(0.0, std::sqrt(x.var_season_init));
    for (int t = last - 1; t >= 0; --t)
      x.mu_season[x.at_st(s, t)] = rng.normal(x.mu_season[x.at_st(s, t + 1)], std::sqrt(x.var_season));
  }

  x.var_interaction_mean = rng.half_normal(1.0 / h.interaction_mean_prior_var);
  x.alpha_a = gamma();
  x.alpha_b = gamma();
  x.prec_interaction = gamma();
  for (int r = 0; r < d.R; ++r) {
    x.eta_interaction[r] = pins.eta_interaction
                               ? *pins.eta_interaction
                               : rng.normal(0.0, std::sqrt(x.var_interaction_mean));
    if (pins.alpha_interaction) {
      x.alpha_interaction[r] = *pins.alpha_interaction;
    } else {
      const auto lb = rng.log_beta(x.alpha_a, x.alpha_b);
      double a = std::exp(lb.log_x);
      if (a >= 1.0) a = kBelowOne;
      if (a <= 0.0) a = std::numeric_limits<double>::min();
      x.alpha_interaction[r] = a;
    }
    for (int t = 0; t < d.T; ++t) x.var_interaction[x.at_rt(r, t)] = rng.half_t(x.prec_interaction, k);
    const double alpha = x.alpha_interaction[r];
    for (int s = 0; s < d.S; ++s) {
      x.mu_interaction[x.at_rst(r, s, last)] =
          rng.normal(x.eta_interaction[r], std::sqrt(x.var_interaction[x.at_rt(r, last)]));
      for (int t = last - 1; t >= 0; --t)
        x.mu_interaction[x.at_rst(r, s, t)] = rng.normal(
            alpha * x.mu_interaction[x.at_rst(r, s, t + 1)], std::sqrt(x.var_interaction[x.at_rt(r, t)]));
    }
  }
  return x;
}

ModelState sample_prior(const Hyperconfig& hyper, Dims dims, std::uint64_t seed) {
  Rng rng(seed);
  return sample_prior(hyper, dims, rng);
}

Observations sample_data(const ModelState& x, const Hyperconfig& h, Rng& rng) {
  const Dims d = x.dims;
  Observations obs(d);
  for (int r = 0; r < d.R; ++r)
    for (int s = 0; s < d.S; ++s)
      for (int t = 0; t < d.T; ++t) {
        const auto [a, b] = beta_args(x.lambda[r], x.pi(r, s, t), h.beta_floor);
        const auto lb = rng.log_beta(a, b);
        obs.set_logs(r, s, t, lb.log_x, lb.log1m_x);
      }
  return obs;
}

std::size_t parameter_count(Dims d) {
  const std::size_t R = d.R, S = d.S, T = d.T;
  return T + R * T + S * T + R * S * T + R + 1 + 4 + 2 + R + 1 + 3 + R + 1 + R + 2 + R * T + 1;
}

std::vector<std::string> parameter_names(Dims d) {
  std::vector<std::string> n;
  n.reserve(parameter_count(d));
  auto idx = [](std::initializer_list<int> is) {
    std::string out = "[";
    bool first = true;
    for (int i : is) {
      if (!first) out += ',';
      out += std::to_string(i + 1);
      first = false;
    }
    return out + "]";
  };
  for (int t = 0; t < d.T; ++t) n.push_back("mu_all" + idx({t}));
  for (int r = 0; r < d.R; ++r)
    for (int t = 0; t < d.T; ++t) n.push_back("mu_state" + idx({r, t}));
  for (int s = 0; s < d.S; ++s)
    for (int t = 0; t < d.T; ++t) n.push_back("mu_season" + idx({s, t}));
  for (int r = 0; r < d.R; ++r)
    for (int s = 0; s < d.S; ++s)
      for (int t = 0; t < d.T; ++t) n.push_back("mu_interaction" + idx({r, s, t}));
  for (int r = 0; r < d.R; ++r) n.push_back("lambda" + idx({r}));
  n.push_back("lambda_prec");
  n.push_back("var_all_init");
  n.push_back("var_all");
  n.push_back("prec_all_init");
  n.push_back("prec_all");
  n.push_back("var_state_init");
  n.push_back("prec_state_init");
  for (int r = 0; r < d.R; ++r) n.push_back("var_state" + idx({r}));
  n.push_back("prec_state");
  n.push_back("var_season_init");
  n.push_back("var_season");
  n.push_back("prec_season");
  for (int r = 0; r < d.R; ++r) n.push_back("eta_interaction" + idx({r}));
  n.push_back("var_interaction_mean");
  for (int r = 0; r < d.R; ++r) n.push_back("alpha_interaction" + idx({r}));
  n.push_back("alpha_a");
  n.push_back("alpha_b");
  for (int r = 0; r < d.R; ++r)
    for (int t = 0; t < d.T; ++t) n.push_back("var_interaction" + idx({r, t}));
  n.push_back("prec_interaction");
  return n;
}

std::vector<double> flatten(const ModelState& x) {
  std::vector<double> v;
  v.reserve(parameter_count(x.dims));
  auto append = [&](const std::vector<double>& a) { v.insert(v.end(), a.begin(), a.end()); };
  append(x.mu_all);
  append(x.mu_state);
  append(x.mu_season);
  append(x.mu_interaction);
  append(x.lambda);
  v.push_back(x.lambda_prec);
  v.push_back(x.var_all_init);
  v.push_back(x.var_all);
  v.push_back(x.prec_all_init);
  v.push_back(x.prec_all);
  v.push_back(x.var_state_init);
  v.push_back(x.prec_state_init);
  append(x.var_state);
  v.push_back(x.prec_state);
  v.push_back(x.var_season_init);
  v.push_back(x.var_season);
  v.push_back(x.prec_season);
  append(x.eta_interaction);
  v.push_back(x.var_interaction_mean);
  append(x.alpha_interaction);
  v.push_back(x.alpha_a);
  v.push_back(x.alpha_b);
  append(x.var_interaction);
  v.push_back(x.prec_interaction);
  return v;
}

ModelState unflatten(Dims d, std::span<const double> v) {
  if (v.size() != parameter_count(d)) throw UsageError("flat state has the wrong length");
  ModelState x = ModelState::zeros(d);
  std::size_t p = 0;
  auto take = [&](std::vector<double>& a) {
    for (auto& e : a) e = v[p++];
  };
  take(x.mu_all);
  take(x.mu_state);
  take(x.mu_season);
  take(x.mu_interaction);
  take(x.lambda);
  x.lambda_prec = v[p++];
  x.var_all_init = v[p++];
  x.var_all = v[p++];
  x.prec_all_init = v[p++];
  x.prec_all = v[p++];
  x.var_state_init = v[p++];
  x.prec_state_init = v[p++];
  take(x.var_state);
  x.prec_state = v[p++];
  x.var_season_init = v[p++];
  x.var_season = v[p++];
  x.prec_season = v[p++];
  take(x.eta_interaction);
  x.var_interaction_mean = v[p++];
  take(x.alpha_interaction);
  x.alpha_a = v[p++];
  x.alpha_b = v[p++];
  take(x.var_interaction);
  x.prec_interaction = v[p++];
  return x;
}

}  // namespace dante
