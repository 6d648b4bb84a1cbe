#include "dante/conditionals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "dante/densities.hpp"

namespace dante {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_sigmoid(double u) { return u >= 0 ? -std::log1p(std::exp(-u)) : u - std::log1p(std::exp(u)); }

// Forward walk term for week t: x[0] ~ N(0, v0), x[t] ~ N(x[t-1], v).
double forward_term(const double* x, int t, double v0, double v) {
  return t == 0 ? density::normal(x[0], 0.0, v0) : density::normal(x[t], x[t - 1], v);
}

// Reverse walk term: x[T-1] ~ N(0, v0), x[t] ~ N(x[t+1], v).
double reverse_term(const double* x, int t, int T, double v0, double v) {
  return t == T - 1 ? density::normal(x[t], 0.0, v0) : density::normal(x[t], x[t + 1], v);
}

double interaction_term(const ModelState& x, int r, int s, int t) {
  const int T = x.dims.T;
  const double* mu = &x.mu_interaction[x.at_rst(r, s, 0)];
  const double v = x.var_interaction[x.at_rt(r, t)];
  return t == T - 1 ? density::normal(mu[t], x.eta_interaction[r], v)
                    : density::normal(mu[t], x.alpha_interaction[r] * mu[t + 1], v);
}

double season_walk(const ModelState& x) {
  const int T = x.dims.T;
  double lp = 0.0;
  for (int s = 0; s < x.dims.S; ++s) {
    const double* mu = &x.mu_season[x.at_st(s, 0)];
    for (int t = 0; t < T; ++t) lp += reverse_term(mu, t, T, x.var_season_init, x.var_season);
  }
  return lp;
}

double gamma_prior(double v, const Hyperconfig& h) { return density::gamma(v, h.gamma_shape, h.gamma_rate); }

double& positive_slot(ModelState& x, const Site& site) {
  switch (site.kind) {
    case SiteKind::Lambda: return x.lambda[site.a];
    case SiteKind::LambdaPrec: return x.lambda_prec;
    case SiteKind::VarAllInit: return x.var_all_init;
    case SiteKind::VarAll: return x.var_all;
    case SiteKind::PrecAllInit: return x.prec_all_init;
    case SiteKind::PrecAll: return x.prec_all;
    case SiteKind::VarStateInit: return x.var_state_init;
    case SiteKind::PrecStateInit: return x.prec_state_init;
    case SiteKind::VarState: return x.var_state[site.a];
    case SiteKind::PrecState: return x.prec_state;
    case SiteKind::PrecSeason: return x.prec_season;
    case SiteKind::VarInteractionMean: return x.var_interaction_mean;
    case SiteKind::AlphaA: return x.alpha_a;
    case SiteKind::AlphaB: return x.alpha_b;
    case SiteKind::VarInteraction: return x.var_interaction[x.at_rt(site.a, site.b)];
    case SiteKind::PrecInteraction: return x.prec_interaction;
    default: break;
  }
  throw std::logic_error("site is not a positive scalar");
}

double& real_slot(ModelState& x, const Site& site) {
  switch (site.kind) {
    case SiteKind::MuAll: return x.mu_all[site.a];
    case SiteKind::MuState: return x.mu_state[x.at_rt(site.a, site.b)];
    case SiteKind::MuSeason: return x.mu_season[x.at_st(site.a, site.b)];
    case SiteKind::MuInteraction: return x.mu_interaction[x.at_rst(site.a, site.b, site.c)];
    case SiteKind::Eta: return x.eta_interaction[site.a];
    default: break;
  }
  throw std::logic_error("site is not an unbounded scalar");
}

bool is_real_site(SiteKind k) { return is_walk_site(k) || k == SiteKind::Eta; }

}  // namespace

bool is_walk_site(SiteKind k) {
  return k == SiteKind::MuAll || k == SiteKind::MuState || k == SiteKind::MuSeason ||
         k == SiteKind::MuInteraction;
}

std::vector<Site> enumerate_sites(Dims d) {
  std::vector<Site> sites;
  using K = SiteKind;
  for (int t = 0; t < d.T; ++t) sites.push_back({K::MuAll, t});
  for (int r = 0; r < d.R; ++r)
    for (int t = 0; t < d.T; ++t) sites.push_back({K::MuState, r, t});
  for (int s = 0; s < d.S; ++s)
    for (int t = 0; t < d.T; ++t) sites.push_back({K::MuSeason, s, t});
  for (int r = 0; r < d.R; ++r)
    for (int s = 0; s < d.S; ++s)
      for (int t = 0; t < d.T; ++t) sites.push_back({K::MuInteraction, r, s, t});
  for (int r = 0; r < d.R; ++r) sites.push_back({K::Lambda, r});
  sites.push_back({K::LambdaPrec});
  sites.push_back({K::VarAllInit});
  sites.push_back({K::VarAll});
  sites.push_back({K::PrecAllInit});
  sites.push_back({K::PrecAll});
  sites.push_back({K::VarStateInit});
  sites.push_back({K::PrecStateInit});
  for (int r = 0; r < d.R; ++r) sites.push_back({K::VarState, r});
  sites.push_back({K::PrecState});
  sites.push_back({K::SeasonScale});
  sites.push_back({K::SeasonRatio});
  sites.push_back({K::PrecSeason});
  for (int r = 0; r < d.R; ++r) sites.push_back({K::Eta, r});
  sites.push_back({K::VarInteractionMean});
  for (int r = 0; r < d.R; ++r) sites.push_back({K::Alpha, r});
  sites.push_back({K::AlphaA});
  sites.push_back({K::AlphaB});
  for (int r = 0; r < d.R; ++r)
    for (int t = 0; t < d.T; ++t) sites.push_back({K::VarInteraction, r, t});
  sites.push_back({K::PrecInteraction});
  return sites;
}

std::string site_name(const Site& site) {
  auto idx = [](std::initializer_list<int> is) {
    std::string out = "[";
    for (int i : is) out += (out.size() > 1 ? "," : "") + std::to_string(i + 1);
    return out + "]";
  };
  switch (site.kind) {
    case SiteKind::MuAll: return "mu_all" + idx({site.a});
    case SiteKind::MuState: return "mu_state" + idx({site.a, site.b});
    case SiteKind::MuSeason: return "mu_season" + idx({site.a, site.b});
    case SiteKind::MuInteraction: return "mu_interaction" + idx({site.a, site.b, site.c});
    case SiteKind::Lambda: return "lambda" + idx({site.a});
    case SiteKind::LambdaPrec: return "lambda_prec";
    case SiteKind::VarAllInit: return "var_all_init";
    case SiteKind::VarAll: return "var_all";
    case SiteKind::PrecAllInit: return "prec_all_init";
    case SiteKind::PrecAll: return "prec_all";
    case SiteKind::VarStateInit: return "var_state_init";
    case SiteKind::PrecStateInit: return "prec_state_init";
    case SiteKind::VarState: return "var_state" + idx({site.a});
    case SiteKind::PrecState: return "prec_state";
    case SiteKind::SeasonScale: return "var_season_init";
    case SiteKind::SeasonRatio: return "var_season";
    case SiteKind::PrecSeason: return "prec_season";
    case SiteKind::Eta: return "eta_interaction" + idx({site.a});
    case SiteKind::VarInteractionMean: return "var_interaction_mean";
    case SiteKind::Alpha: return "alpha_interaction" + idx({site.a});
    case SiteKind::AlphaA: return "alpha_a";
    case SiteKind::AlphaB: return "alpha_b";
    case SiteKind::VarInteraction: return "var_interaction" + idx({site.a, site.b});
    case SiteKind::PrecInteraction: return "prec_interaction";
  }
  return "?";
}

double site_unconstrained(const ModelState& x, const Site& site) {
  auto& m = const_cast<ModelState&>(x);
  if (is_real_site(site.kind)) return real_slot(m, site);
  switch (site.kind) {
    case SiteKind::Alpha: return logit(x.alpha_interaction[site.a]);
    case SiteKind::SeasonScale: return std::log(x.var_season_init);
    case SiteKind::SeasonRatio: return logit(x.var_season / x.var_season_init);
    default: return std::log(positive_slot(m, site));
  }
}

void site_set_unconstrained(ModelState& x, const Site& site, double u) {
  if (is_real_site(site.kind)) {
    real_slot(x, site) = u;
    return;
  }
  switch (site.kind) {
    case SiteKind::Alpha:
      x.alpha_interaction[site.a] =
          std::clamp(inv_logit(u), std::numeric_limits<double>::min(), 1.0 - 0x1.0p-53);
      break;
    case SiteKind::SeasonScale: {
      const double ratio = x.var_season / x.var_season_init;
      x.var_season_init = std::exp(u);
      x.var_season = ratio * x.var_season_init;
      break;
    }
    case SiteKind::SeasonRatio:
      x.var_season = inv_logit(u) * x.var_season_init;
      break;
    default:
      positive_slot(x, site) = std::exp(u);
  }
}

SiteValues site_values(const ModelState& x, const Site& site) {
  auto& m = const_cast<ModelState&>(x);
  if (is_real_site(site.kind)) return {real_slot(m, site)};
  switch (site.kind) {
    case SiteKind::Alpha: return {x.alpha_interaction[site.a]};
    case SiteKind::SeasonScale:
    case SiteKind::SeasonRatio: return {x.var_season_init, x.var_season};
    default: return {positive_slot(m, site)};
  }
}

void site_restore(ModelState& x, const Site& site, const SiteValues& v) {
  if (is_real_site(site.kind)) {
    real_slot(x, site) = v.first;
    return;
  }
  switch (site.kind) {
    case SiteKind::Alpha:
      x.alpha_interaction[site.a] = v.first;
      break;
    case SiteKind::SeasonScale:
    case SiteKind::SeasonRatio:
      x.var_season_init = v.first;
      x.var_season = v.second;
      break;
    default:
      positive_slot(x, site) = v.first;
  }
}

double site_log_jacobian(const ModelState& x, const Site& site) {
  if (is_real_site(site.kind)) return 0.0;
  switch (site.kind) {
    case SiteKind::Alpha: {
      const double u = logit(x.alpha_interaction[site.a]);
      return log_sigmoid(u) + log_sigmoid(-u);
    }
    case SiteKind::SeasonScale:
    case SiteKind::SeasonRatio: {
      const double V = x.var_season_init, v = x.var_season;
      return std::log(V) + std::log(v) + std::log1p(-v / V);
    }
    default:
      return std::log(positive_slot(const_cast<ModelState&>(x), site));
  }
}

double local_log_prior(const ModelState& x, const Hyperconfig& h, const Site& site) {
  const Dims d = x.dims;
  const int T = d.T;
  const double k = h.t_dof;
  double lp = 0.0;
  switch (site.kind) {
    case SiteKind::MuAll: {
      const double* mu = x.mu_all.data();
      lp = forward_term(mu, site.a, x.var_all_init, x.var_all);
      if (site.a + 1 < T) lp += forward_term(mu, site.a + 1, x.var_all_init, x.var_all);
      break;
    }
    case SiteKind::MuState: {
      const double* mu = &x.mu_state[x.at_rt(site.a, 0)];
      const double v = x.var_state[site.a];
      lp = forward_term(mu, site.b, x.var_state_init, v);
      if (site.b + 1 < T) lp += forward_term(mu, site.b + 1, x.var_state_init, v);
      break;
    }
    case SiteKind::MuSeason: {
      const double* mu = &x.mu_season[x.at_st(site.a, 0)];
      lp = reverse_term(mu, site.b, T, x.var_season_init, x.var_season);
      if (site.b > 0) lp += reverse_term(mu, site.b - 1, T, x.var_season_init, x.var_season);
      break;
    }
    case SiteKind::MuInteraction:
      lp = interaction_term(x, site.a, site.b, site.c);
      if (site.c > 0) lp += interaction_term(x, site.a, site.b, site.c - 1);
      break;
    case SiteKind::Lambda:
      lp = density::half_t(x.lambda[site.a], x.lambda_prec, k);
      break;
    case SiteKind::LambdaPrec:
      for (int r = 0; r < d.R; ++r) lp += density::half_t(x.lambda[r], x.lambda_prec, k);
      lp += gamma_prior(x.lambda_prec, h);
      break;
    case SiteKind::VarAllInit:
      lp = density::normal(x.mu_all[0], 0.0, x.var_all_init) +
           density::half_normal(x.var_all_init, x.prec_all_init);
      break;
    case SiteKind::VarAll:
      for (int t = 1; t < T; ++t) lp += density::normal(x.mu_all[t], x.mu_all[t - 1], x.var_all);
      lp += density::half_normal(x.var_all, x.prec_all);
      break;
    case SiteKind::PrecAllInit:
      lp = density::half_normal(x.var_all_init, x.prec_all_init) + gamma_prior(x.prec_all_init, h);
      break;
    case SiteKind::PrecAll:
      lp = density::half_normal(x.var_all, x.prec_all) + gamma_prior(x.prec_all, h);
      break;
    case SiteKind::VarStateInit:
      for (int r = 0; r < d.R; ++r)
        lp += density::normal(x.mu_state[x.at_rt(r, 0)], 0.0, x.var_state_init);
      lp += density::half_normal(x.var_state_init, x.prec_state_init);
      break;
    case SiteKind::PrecStateInit:
      lp = density::half_normal(x.var_state_init, x.prec_state_init) + gamma_prior(x.prec_state_init, h);
      break;
    case SiteKind::VarState: {
      const int r = site.a;
      for (int t = 1; t < T; ++t)
        lp += density::normal(x.mu_state[x.at_rt(r, t)], x.mu_state[x.at_rt(r, t - 1)], x.var_state[r]);
      lp += density::half_t(x.var_state[r], x.prec_state, k);
      break;
    }
    case SiteKind::PrecState:
      for (int r = 0; r < d.R; ++r) lp += density::half_t(x.var_state[r], x.prec_state, k);
      lp += gamma_prior(x.prec_state, h);
      break;
    case SiteKind::SeasonScale:
      lp = season_walk(x) + density::half_t(x.var_season_init, x.prec_season, k) +
           density::truncated_t(x.var_season, x.prec_season, k, x.var_season_init);
      break;
    case SiteKind::SeasonRatio:
      for (int s = 0; s < d.S; ++s) {
        const double* mu = &x.mu_season[x.at_st(s, 0)];
        for (int t = 0; t + 1 < T; ++t) lp += density::normal(mu[t], mu[t + 1], x.var_season);
      }
      lp += density::truncated_t(x.var_season, x.prec_season, k, x.var_season_init);
      break;
    case SiteKind::PrecSeason:
      lp = density::half_t(x.var_season_init, x.prec_season, k) +
           density::truncated_t(x.var_season, x.prec_season, k, x.var_season_init) +
           gamma_prior(x.prec_season, h);
      break;
    case SiteKind::Eta:
      for (int s = 0; s < d.S; ++s) lp += interaction_term(x, site.a, s, T - 1);
      lp += density::normal(x.eta_interaction[site.a], 0.0, x.var_interaction_mean);
      break;
    case SiteKind::VarInteractionMean:
      for (int r = 0; r < d.R; ++r)
        lp += density::normal(x.eta_interaction[r], 0.0, x.var_interaction_mean);
      lp += density::half_normal(x.var_interaction_mean, 1.0 / h.interaction_mean_prior_var);
      break;
    case SiteKind::Alpha:
      for (int s = 0; s < d.S; ++s)
        for (int t = 0; t + 1 < T; ++t) lp += interaction_term(x, site.a, s, t);
      lp += density::beta(x.alpha_interaction[site.a], x.alpha_a, x.alpha_b);
      break;
    case SiteKind::AlphaA:
    case SiteKind::AlphaB:
      for (int r = 0; r < d.R; ++r) lp += density::beta(x.alpha_interaction[r], x.alpha_a, x.alpha_b);
      lp += gamma_prior(site.kind == SiteKind::AlphaA ? x.alpha_a : x.alpha_b, h);
      break;
    case SiteKind::VarInteraction:
      for (int s = 0; s < d.S; ++s) lp += interaction_term(x, site.a, s, site.b);
      lp += density::half_t(x.var_interaction[x.at_rt(site.a, site.b)], x.prec_interaction, k);
      break;
    case SiteKind::PrecInteraction:
      for (double v : x.var_interaction) lp += density::half_t(v, x.prec_interaction, k);
      lp += gamma_prior(x.prec_interaction, h);
      break;
  }
  return std::isnan(lp) ? kNegInf : lp;
}

double cell_log_likelihood(const ModelState& x, const Observations& obs, const Hyperconfig& h, int r,
                           int s, int t) {
  const auto i = obs.index(r, s, t);
  if (!obs.observed(i)) return 0.0;
  const auto [a, b] = beta_args(x.lambda[r], x.pi(r, s, t), h.beta_floor);
  return density::beta_from_logs(obs.log_y(i), obs.log1m_y(i), a, b);
}

double local_log_density(const ModelState& x, const Observations& obs, const Hyperconfig& h,
                         const Site& site) {
  double lp = local_log_prior(x, h, site);
  for_each_cell(x.dims, site, [&](int r, int s, int t) { lp += cell_log_likelihood(x, obs, h, r, s, t); });
  return lp;
}

}  // namespace dante
