#pragma once

#include <cstdint>
#include <random>

namespace dante {

// Deterministic random source. All variate algorithms are implemented here
// rather than taken from <random> distributions so that a seed produces the
// same stream on every standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Independent stream for (seed, a, b), e.g. one per chain or replicate.
  static Rng derive(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

  double uniform();            // (0, 1)
  double normal();             // N(0, 1)
  double normal(double mean, double sd) { return mean + sd * normal(); }
  double gamma(double shape);  // unit rate
  double gamma(double shape, double rate) { return gamma(shape) / rate; }
  // log of a unit-rate Gamma(shape) variate, accurate for tiny shapes where
  // the variate itself underflows.
  double log_gamma(double shape);

  struct LogBeta {
    double log_x;
    double log1m_x;
  };
  LogBeta log_beta(double a, double b);
  double beta(double a, double b);

  double student_t(double dof);  // standard t
  double half_t(double precision, double dof);
  double half_normal(double precision);
  // t(0, precision, dof) restricted to [0, upper].
  double truncated_t(double precision, double dof, double upper);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace dante
