#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "dante/model.hpp"
#include "dante/sampler.hpp"

namespace dante {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

// Sampler mean versus direct prior Monte Carlo for one parameter, with all
// data missing.
struct RecoveryMoment {
  std::string name;
  double sampler_mean = 0.0;
  double prior_mean = 0.0;
  double z = 0.0;  // difference over the combined standard error
};

/// Runs `config` on an all-missing panel and compares the retained means of
/// lambda_prec, alpha_a and alpha_b with `prior_draws` ancestral draws.
std::vector<RecoveryMoment> prior_recovery(const Hyperconfig& hyper, Dims dims, const McmcConfig& config,
                                           int prior_draws, std::uint64_t seed, int jobs = 1);

struct SelfcheckOptions {
  int geweke_cycles = 2000;
  std::uint64_t seed = 1;
  int jobs = 1;
};

/// Golden examples, the prior-recovery check and a Geweke joint test.
std::vector<CheckResult> run_selfcheck(const Hyperconfig& hyper, const SelfcheckOptions& options = {});
void print_checks(std::ostream& out, const std::vector<CheckResult>& checks);

}  // namespace dante
