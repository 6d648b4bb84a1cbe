#include "dante/rng.hpp"

#include <algorithm>
#include <cmath>

namespace dante {
namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double log_sum_exp(double a, double b) {
  const double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

}  // namespace

Rng Rng::derive(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  return Rng(splitmix(splitmix(splitmix(seed) ^ a) ^ (b * 0x632be59bd9b4e019ULL)));
}

double Rng::uniform() {
  // 53 random bits, shifted off zero.
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * f;
  has_spare_ = true;
  return u * f;
}

double Rng::gamma(double shape) {
  if (shape < 1.0) {
    // Boost: G(a) = G(a + 1) * U^(1/a).
    return gamma(shape + 1.0) * std::pow(uniform(), 1.0 / shape);
  }
  // Marsaglia & Tsang.
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double Rng::log_gamma(double shape) {
  if (shape >= 1.0) return std::log(gamma(shape));
  return std::log(gamma(shape + 1.0)) + std::log(uniform()) / shape;
}

Rng::LogBeta Rng::log_beta(double a, double b) {
  const double la = log_gamma(a);
  const double lb = log_gamma(b);
  const double lt = log_sum_exp(la, lb);
  return {la - lt, lb - lt};
}

double Rng::beta(double a, double b) { return std::exp(log_beta(a, b).log_x); }

double Rng::student_t(double dof) {
  const double z = normal();
  const double chi2 = 2.0 * gamma(0.5 * dof);
  return z / std::sqrt(chi2 / dof);
}

double Rng::half_t(double precision, double dof) {
  return std::fabs(student_t(dof)) / std::sqrt(precision);
}

double Rng::half_normal(double precision) { return std::fabs(normal()) / std::sqrt(precision); }

double Rng::truncated_t(double precision, double dof, double upper) {
  const double scale = 1.0 / std::sqrt(precision);
  if (upper <= scale) {
    // Uniform proposal on [0, upper]; the density is decreasing there, so accept
    // with f(x)/f(0). Acceptance is at least (1 + 1/dof)^(-(dof+1)/2).
    for (;;) {
      const double x = upper * uniform();
      const double z2 = precision * x * x;
      const double ratio = std::pow(1.0 + z2 / dof, -0.5 * (dof + 1.0));
      if (uniform() < ratio) return x;
    }
  }
  // Half-t proposal rejected above the bound; acceptance is P(|T| <= 1) or more.
  for (;;) {
    const double x = half_t(precision, dof);
    if (x <= upper) return x;
  }
}

}  // namespace dante
