#include "dante/densities.hpp"

#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <limits>
#include <numbers>

namespace dante::density {
namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kLog2 = std::numbers::ln2;
constexpr double kLogPi = 1.1447298858494002;  // log(pi)
constexpr double kLog2Pi = 1.8378770664093453;  // log(2 pi)
}  // namespace

double normal(double x, double mean, double variance) {
  if (!(variance > 0.0) || !std::isfinite(x)) return kNegInf;
  const double d = x - mean;
  return -0.5 * (kLog2Pi + std::log(variance)) - 0.5 * d * d / variance;
}

double half_normal(double x, double precision) {
  if (!(x >= 0.0) || !(precision > 0.0) || !std::isfinite(x)) return kNegInf;
  return kLog2 + 0.5 * (std::log(precision) - kLog2Pi) - 0.5 * precision * x * x;
}

double student_t(double x, double mean, double precision, double dof) {
  if (!(precision > 0.0) || !(dof > 0.0) || !std::isfinite(x)) return kNegInf;
  const double d = x - mean;
  return std::lgamma(0.5 * (dof + 1.0)) - std::lgamma(0.5 * dof) +
         0.5 * (std::log(precision) - std::log(dof) - kLogPi) -
         0.5 * (dof + 1.0) * std::log1p(precision * d * d / dof);
}

double half_t(double x, double precision, double dof) {
  if (!(x >= 0.0)) return kNegInf;
  return kLog2 + student_t(x, 0.0, precision, dof);
}

double t_mass_from_zero(double upper, double precision, double dof) {
  if (!(upper > 0.0)) return kNegInf;
  if (std::isinf(upper)) return -kLog2;
  // P(0 <= T <= z) = I_{z^2/(dof+z^2)}(1/2, dof/2) / 2 for the standard t.
  const double z2 = precision * upper * upper;
  const double arg = z2 / (dof + z2);
  return std::log(0.5 * boost::math::ibeta(0.5, 0.5 * dof, arg));
}

double truncated_t(double x, double precision, double dof, double upper) {
  if (!(x >= 0.0) || !(x <= upper)) return kNegInf;
  return student_t(x, 0.0, precision, dof) - t_mass_from_zero(upper, precision, dof);
}

double gamma(double x, double shape, double rate) {
  if (!(x > 0.0) || !(shape > 0.0) || !(rate > 0.0) || !std::isfinite(x)) return kNegInf;
  return shape * std::log(rate) - std::lgamma(shape) + (shape - 1.0) * std::log(x) - rate * x;
}

double log_beta_function(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

double beta(double x, double a, double b) {
  if (!(x >= 0.0) || !(x <= 1.0)) return kNegInf;
  return beta_from_logs(std::log(x), std::log1p(-x), a, b);
}

double beta_from_logs(double log_x, double log1m_x, double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) return kNegInf;
  // Boundary points: density is 0 or infinite depending on the shape.
  const double lx = (a == 1.0) ? 0.0 : (a - 1.0) * log_x;
  const double l1mx = (b == 1.0) ? 0.0 : (b - 1.0) * log1m_x;
  const double v = lx + l1mx - log_beta_function(a, b);
  return std::isnan(v) ? kNegInf : v;
}

}  // namespace dante::density
