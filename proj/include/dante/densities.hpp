#pragma once

// Log-densities used by the model. Normal densities take a variance; the
// Student-t, half-normal and truncated forms take a precision, matching the
// hierarchy's parameterisation. Every function returns -inf outside support.

namespace dante::density {

double normal(double x, double mean, double variance);

// N_[0,inf)(0, 1/precision).
double half_normal(double x, double precision);

// Non-standardised t with location `mean`, precision `precision`, `dof` degrees of freedom.
double student_t(double x, double mean, double precision, double dof);

// t_[0,inf)(0, precision, dof).
double half_t(double x, double precision, double dof);

// t_[0,upper](0, precision, dof), normalised by the mass on [0, upper].
double truncated_t(double x, double precision, double dof, double upper);

// log P(0 <= X <= upper) for X ~ t(0, precision, dof).
double t_mass_from_zero(double upper, double precision, double dof);

// Shape/rate parameterisation.
double gamma(double x, double shape, double rate);

double beta(double x, double a, double b);
// Beta log-density from precomputed log(x) and log(1-x); lets callers keep
// observations arbitrarily close to 0 or 1 without rounding to the boundary.
double beta_from_logs(double log_x, double log1m_x, double a, double b);

double log_beta_function(double a, double b);

}  // namespace dante::density
