#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "dante/sampler.hpp"

namespace dante {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double mean(const std::vector<double>& x) {
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double sample_var(const std::vector<double>& x, double mu) {
  double ss = 0.0;
  for (double v : x) ss += (v - mu) * (v - mu);
  return ss / static_cast<double>(x.size() - 1);
}

// Biased autocovariance at `lag`.
double autocov(const std::vector<double>& x, double mu, std::size_t lag) {
  double sum = 0.0;
  for (std::size_t i = 0; i + lag < x.size(); ++i) sum += (x[i] - mu) * (x[i + lag] - mu);
  return sum / static_cast<double>(x.size());
}

}  // namespace

double split_rhat(const std::vector<std::vector<double>>& chains) {
  if (chains.size() < 2) return kNaN;
  std::size_t n = chains.front().size();
  for (const auto& c : chains) n = std::min(n, c.size());
  const std::size_t half = n / 2;
  if (half < 2) return kNaN;
  std::vector<std::vector<double>> parts;
  for (const auto& c : chains) {
    parts.emplace_back(c.begin(), c.begin() + half);
    parts.emplace_back(c.begin() + (n - half), c.begin() + n);
  }
  std::vector<double> means;
  double W = 0.0;
  for (const auto& p : parts) {
    const double mu = mean(p);
    means.push_back(mu);
    W += sample_var(p, mu);
  }
  W /= static_cast<double>(parts.size());
  const double B_over_n = sample_var(means, mean(means));
  if (!(W > 0.0)) return B_over_n > 0.0 ? std::numeric_limits<double>::infinity() : kNaN;
  const double hn = static_cast<double>(half);
  const double var_plus = (hn - 1.0) / hn * W + B_over_n;
  return std::sqrt(var_plus / W);
}

double effective_sample_size(const std::vector<std::vector<double>>& chains) {
  if (chains.empty()) return kNaN;
  std::size_t n = chains.front().size();
  for (const auto& c : chains) n = std::min(n, c.size());
  if (n < 4) return kNaN;
  const std::size_t C = chains.size();
  std::vector<std::vector<double>> xs;
  std::vector<double> mus;
  for (const auto& c : chains) {
    xs.emplace_back(c.begin(), c.begin() + n);
    mus.push_back(mean(xs.back()));
  }
  const double dn = static_cast<double>(n);
  double W = 0.0;
  std::vector<double> acov0(C);
  for (std::size_t k = 0; k < C; ++k) {
    acov0[k] = autocov(xs[k], mus[k], 0);
    W += acov0[k] * dn / (dn - 1.0);
  }
  W /= static_cast<double>(C);
  const double B_over_n = C > 1 ? sample_var(mus, mean(mus)) : 0.0;
  const double var_plus = W * (dn - 1.0) / dn + B_over_n;
  if (!(var_plus > 0.0)) return kNaN;

  auto rho = [&](std::size_t lag) {
    double a = 0.0;
    for (std::size_t k = 0; k < C; ++k) a += autocov(xs[k], mus[k], lag);
    a /= static_cast<double>(C);
    return 1.0 - (W - a) / var_plus;
  };
  // Geyer: sum adjacent pairs while positive, forcing them non-increasing.
  double tau = -1.0;
  double prev_pair = std::numeric_limits<double>::infinity();
  for (std::size_t lag = 0; lag + 1 < n; lag += 2) {
    double pair = rho(lag) + rho(lag + 1);
    if (pair < 0.0) break;
    pair = std::min(pair, prev_pair);
    prev_pair = pair;
    tau += 2.0 * pair;
  }
  tau = std::max(tau, 1.0 / std::log10(static_cast<double>(C) * dn));
  return static_cast<double>(C) * dn / tau;
}

Diagnostics compute_diagnostics(const PosteriorDraws& draws, int n_chains, double threshold) {
  Diagnostics d;
  const std::size_t W = draws.width();
  std::vector<std::vector<std::size_t>> rows_of(n_chains);
  for (std::size_t m = 0; m < draws.M(); ++m) rows_of[draws.chain_id[m]].push_back(m);
  std::vector<std::vector<double>> chains(n_chains);
  for (std::size_t c = 0; c < W; ++c) {
    for (int k = 0; k < n_chains; ++k) {
      chains[k].resize(rows_of[k].size());
      for (std::size_t i = 0; i < rows_of[k].size(); ++i)
        chains[k][i] = draws.values[rows_of[k][i] * W + c];
    }
    ParameterDiagnostic p;
    p.name = draws.names[c];
    p.rhat = n_chains > 1 ? split_rhat(chains) : kNaN;
    p.ess = effective_sample_size(chains);
    if (p.rhat > threshold) {
      std::ostringstream msg;
      msg << "R-hat " << p.rhat << " above " << threshold << " for " << p.name;
      d.warnings.push_back(msg.str());
    }
    d.parameters.push_back(std::move(p));
  }
  return d;
}

}  // namespace dante
