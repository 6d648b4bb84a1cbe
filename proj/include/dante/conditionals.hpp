#pragma once

#include <string>
#include <vector>

#include "dante/model.hpp"

namespace dante {

// One univariate update target. Each site moves one coordinate of an
// unconstrained parameterisation: log for positive scalars, logit for the
// AR coefficients, and for the season variances the pair
// (log var_season_init, logit(var_season / var_season_init)).
enum class SiteKind {
  MuAll,           // a = t
  MuState,         // a = r, b = t
  MuSeason,        // a = s, b = t
  MuInteraction,   // a = r, b = s, c = t
  Lambda,          // a = r
  LambdaPrec,
  VarAllInit,
  VarAll,
  PrecAllInit,
  PrecAll,
  VarStateInit,
  PrecStateInit,
  VarState,        // a = r
  PrecState,
  SeasonScale,     // log var_season_init, ratio held fixed
  SeasonRatio,     // logit(var_season / var_season_init)
  PrecSeason,
  Eta,             // a = r
  VarInteractionMean,
  Alpha,           // a = r
  AlphaA,
  AlphaB,
  VarInteraction,  // a = r, b = t
  PrecInteraction,
};

struct Site {
  SiteKind kind;
  int a = 0;
  int b = 0;
  int c = 0;
};

bool is_walk_site(SiteKind kind);

// Every site of a model, in sweep order: walks first, then scale parameters
// from the bottom of the hierarchy up.
std::vector<Site> enumerate_sites(Dims dims);
std::string site_name(const Site& site);

double site_unconstrained(const ModelState& x, const Site& site);
void site_set_unconstrained(ModelState& x, const Site& site, double u);
// Raw values touched by a site (two for the season pair), for exact restores.
struct SiteValues {
  double first = 0.0;
  double second = 0.0;
};
SiteValues site_values(const ModelState& x, const Site& site);
void site_restore(ModelState& x, const Site& site, const SiteValues& values);

// log |d(constrained)/d(unconstrained)| at the current point.
double site_log_jacobian(const ModelState& x, const Site& site);

/// Sum of the prior factors that involve the site's variable(s).
double local_log_prior(const ModelState& x, const Hyperconfig& hyper, const Site& site);

// Cells whose likelihood depends on the site; empty for pure prior sites.
template <typename F>
void for_each_cell(const Dims& d, const Site& site, F&& f) {
  switch (site.kind) {
    case SiteKind::MuAll:
      for (int r = 0; r < d.R; ++r)
        for (int s = 0; s < d.S; ++s) f(r, s, site.a);
      break;
    case SiteKind::MuState:
      for (int s = 0; s < d.S; ++s) f(site.a, s, site.b);
      break;
    case SiteKind::MuSeason:
      for (int r = 0; r < d.R; ++r) f(r, site.a, site.b);
      break;
    case SiteKind::MuInteraction:
      f(site.a, site.b, site.c);
      break;
    case SiteKind::Lambda:
      for (int s = 0; s < d.S; ++s)
        for (int t = 0; t < d.T; ++t) f(site.a, s, t);
      break;
    default:
      break;
  }
}

/// local_log_prior plus the likelihood of the affected observed cells. Up to
/// a constant in the site's variable this equals log_joint.
double local_log_density(const ModelState& x, const Observations& obs, const Hyperconfig& hyper,
                         const Site& site);

/// Log-likelihood of one cell, 0 when missing.
double cell_log_likelihood(const ModelState& x, const Observations& obs, const Hyperconfig& hyper,
                           int r, int s, int t);

}  // namespace dante
