#pragma once

#include <functional>

namespace qvol {

double normal_pdf(double x);
double normal_cdf(double x);

// log K_nu(x) for real order nu and x > 0, from the integral representation
//   K_nu(x) = int_0^inf exp(-x cosh t) cosh(nu t) dt.
// Evaluated relative to the integrand's peak, so it stays finite where K_nu
// itself under- or overflows.
double log_bessel_k(double nu, double x);
double bessel_k(double nu, double x);

// Integral over (0, inf) after the substitution x = u / (1 - u), by tanh-sinh
// quadrature so that integrable endpoint singularities are handled.
double integrate_half_line(const std::function<double(double)>& f, double rel_tol = 1e-13);

// Adaptive Gauss-Kronrod on a finite interval.
double integrate_interval(const std::function<double(double)>& f, double a, double b,
                          double rel_tol = 1e-13);

}  // namespace qvol
