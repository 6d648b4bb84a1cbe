#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dante/rng.hpp"

namespace dante {

class IliPanel;

struct Dims {
  int R = 0;  // states
  int S = 0;  // seasons
  int T = 0;  // weeks per season
  std::size_t cells() const { return static_cast<std::size_t>(R) * S * T; }
  bool operator==(const Dims&) const = default;
};

// Fixed hyperparameters of the hierarchy.
struct Hyperconfig {
  double gamma_shape = 5.0;  // every Gamma(shape, rate) precision prior
  double gamma_rate = 5.0;
  double t_dof = 3.0;  // half-t and truncated-t priors
  // Variance of the half-normal prior on var_interaction_mean.
  double interaction_mean_prior_var = 0.05;
  // Lower bound applied to both Beta shape arguments.
  double beta_floor = 1e-8;

  void validate() const;
};

// One point in parameter space. Every time series is stored in forward time
// (index t = 0..T-1); the season and interaction walks are reverse walks that
// start at t = T-1.
struct ModelState {
  Dims dims;

  std::vector<double> mu_all;          // [t]
  std::vector<double> mu_state;        // [r][t]
  std::vector<double> mu_season;       // [s][t]
  std::vector<double> mu_interaction;  // [r][s][t]

  std::vector<double> lambda;  // [r] Beta precision per state
  double lambda_prec = 1.0;

  double var_all_init = 1.0;
  double var_all = 1.0;
  double prec_all_init = 1.0;
  double prec_all = 1.0;

  double var_state_init = 1.0;
  double prec_state_init = 1.0;
  std::vector<double> var_state;  // [r]
  double prec_state = 1.0;

  double var_season_init = 1.0;  // variance at the final week
  double var_season = 0.5;       // step variance, at most var_season_init
  double prec_season = 1.0;

  std::vector<double> eta_interaction;    // [r] mean at the final week
  double var_interaction_mean = 0.05;
  std::vector<double> alpha_interaction;  // [r] in (0, 1)
  double alpha_a = 1.0;
  double alpha_b = 1.0;
  std::vector<double> var_interaction;  // [r][t]
  double prec_interaction = 1.0;

  static ModelState zeros(Dims dims);

  std::size_t at_rt(int r, int t) const { return static_cast<std::size_t>(r) * dims.T + t; }
  std::size_t at_st(int s, int t) const { return static_cast<std::size_t>(s) * dims.T + t; }
  std::size_t at_rst(int r, int s, int t) const {
    return (static_cast<std::size_t>(r) * dims.S + s) * dims.T + t;
  }

  // Linear predictor: sum of the four mean components.
  double pi(int r, int s, int t) const {
    return mu_all[t] + mu_state[at_rt(r, t)] + mu_season[at_st(s, t)] +
           mu_interaction[at_rst(r, s, t)];
  }

  // Positivity, interval and shape constraints.
  bool in_support() const;
};

double inv_logit(double x);
double logit(double p);

/// Latent ILI proportion: inverse logit of the four-component sum.
double theta_of(const ModelState& state, int r, int s, int t);

struct BetaArgs {
  double a;
  double b;
};
// Beta(lambda*theta, lambda*(1-theta)) shapes from the linear predictor,
// computed without forming 1-theta and floored at `floor`.
BetaArgs beta_args(double lambda, double pi, double floor);

// Observed data on the log scale: log y and log(1-y) per cell, so synthetic
// draws arbitrarily close to 0 or 1 stay representable.
class Observations {
 public:
  Observations() = default;
  explicit Observations(Dims dims);  // all missing

  static Observations from_panel(const IliPanel& panel);

  const Dims& dims() const { return dims_; }
  std::size_t index(int r, int s, int t) const {
    return (static_cast<std::size_t>(r) * dims_.S + s) * dims_.T + t;
  }
  bool observed(std::size_t i) const { return observed_[i] != 0; }
  double log_y(std::size_t i) const { return log_y_[i]; }
  double log1m_y(std::size_t i) const { return log1m_y_[i]; }

  void set(int r, int s, int t, double y);
  void set_logs(int r, int s, int t, double log_y, double log1m_y);
  void set_missing(int r, int s, int t);
  std::size_t count_observed() const;

 private:
  Dims dims_;
  std::vector<unsigned char> observed_;
  std::vector<double> log_y_;
  std::vector<double> log1m_y_;
};

/// Sum of Beta log-densities over observed cells; missing cells contribute 0.
/// Throws NumericalError naming the cell if a term is not finite.
double log_likelihood(const ModelState& state, const Observations& obs, const Hyperconfig& hyper);

/// Sum of every prior factor of the hierarchy; -inf outside the support.
double log_prior(const ModelState& state, const Hyperconfig& hyper);

double log_joint(const ModelState& state, const Observations& obs, const Hyperconfig& hyper);

// Parameters held fixed during ancestral sampling.
struct PriorPins {
  std::optional<double> alpha_interaction;
  std::optional<double> eta_interaction;
};

/// Ancestral draw from the full hierarchy.
ModelState sample_prior(const Hyperconfig& hyper, Dims dims, Rng& rng, const PriorPins& pins = {});
ModelState sample_prior(const Hyperconfig& hyper, Dims dims, std::uint64_t seed);

/// Data drawn from the Beta data model at every cell.
Observations sample_data(const ModelState& state, const Hyperconfig& hyper, Rng& rng);

// Flat named-vector form, e.g. "mu_state[3,12]" with 1-based indices.
std::vector<std::string> parameter_names(Dims dims);
std::vector<double> flatten(const ModelState& state);
ModelState unflatten(Dims dims, std::span<const double> values);
std::size_t parameter_count(Dims dims);

}  // namespace dante
