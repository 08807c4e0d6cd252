#include "qvol/special.hpp"

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "qvol/errors.hpp"

namespace qvol {

namespace gk = boost::math::quadrature;

double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double log_bessel_k(double nu, double x) {
    if (!(x > 0.0)) throw InvalidArgument("bessel_k requires x > 0");
    nu = std::fabs(nu);  // K_{-nu} = K_nu

    // Log of the dominant branch exp(-x (cosh t - 1) + nu t); cosh t - 1 = 2 sinh^2(t/2).
    auto exponent = [&](double t) {
        const double s = std::sinh(0.5 * t);
        return -2.0 * x * s * s + nu * t;
    };
    const double t_peak = std::asinh(nu / x);
    const double peak = exponent(t_peak);

    // Right end where the integrand has fallen by e^-60 from its peak.
    double t_max = t_peak + 1.0;
    while (exponent(t_max) - peak > -60.0) t_max = t_peak + 2.0 * (t_max - t_peak);

    auto integrand = [&](double t) {
        const double s = std::sinh(0.5 * t);
        const double base = -2.0 * x * s * s - peak;
        return 0.5 * (std::exp(base + nu * t) + std::exp(base - nu * t));
    };
    using rule = gk::gauss_kronrod<double, 61>;
    double err = 0.0;
    double value = 0.0;
    if (t_peak > 0.0) {
        value = rule::integrate(integrand, 0.0, t_peak, 10, 1e-14, &err) +
                rule::integrate(integrand, t_peak, t_max, 10, 1e-14, &err);
    } else {
        value = rule::integrate(integrand, 0.0, t_max, 10, 1e-14, &err);
    }
    return peak - x + std::log(value);
}

double bessel_k(double nu, double x) { return std::exp(log_bessel_k(nu, x)); }

double integrate_half_line(const std::function<double(double)>& f, double rel_tol) {
    // Double-exponential rule on u in (0, 1): Gauss-Kronrod bisection cannot resolve the
    // x^(xi-1) endpoint singularity of gamma densities with 0 < xi < 1.
    auto g = [&](double u) {
        if (u <= 0.0 || u >= 1.0) return 0.0;
        const double one_minus = 1.0 - u;
        return f(u / one_minus) / (one_minus * one_minus);
    };
    static thread_local gk::tanh_sinh<double> rule(15);
    return rule.integrate(g, 0.0, 1.0, rel_tol);
}

double integrate_interval(const std::function<double(double)>& f, double a, double b,
                          double rel_tol) {
    double err = 0.0;
    return gk::gauss_kronrod<double, 61>::integrate(f, a, b, 20, rel_tol, &err);
}

}  // namespace qvol
