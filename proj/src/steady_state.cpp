#include "qvol/steady_state.hpp"

#include <cmath>
#include <limits>

#include "qvol/errors.hpp"
#include "qvol/special.hpp"

namespace qvol::steady_state {

std::string_view to_string(Tag tag) {
    switch (tag) {
        case Tag::DegenerateZero: return "DegenerateZero";
        case Tag::InverseGamma: return "InverseGamma";
        case Tag::Gamma: return "Gamma";
        case Tag::GIG: return "GIG";
    }
    return "?";
}

Classification classify(const ModelParams& p) {
    const double nu2 = p.nu * p.nu;
    const double xi = -2.0 * (p.R0 - p.R1 * p.R2) / nu2 - 1.0;
    Tag tag;
    if (p.R0 == 0.0) {
        tag = (p.R1 > 0.0 && 2.0 * p.R1 * p.R2 > nu2) ? Tag::Gamma : Tag::DegenerateZero;
    } else {
        tag = p.R1 == 0.0 ? Tag::InverseGamma : Tag::GIG;
    }
    return {tag, xi};
}

namespace {

// log of the normalizing constant C in C x^(xi-1) exp(-a/x - b x)
double log_normalizer(const ModelParams& p, const Classification& c) {
    const double nu2 = p.nu * p.nu;
    switch (c.tag) {
        case Tag::Gamma:
            return c.xi * std::log(2.0 * p.R1 / nu2) - std::lgamma(c.xi);
        case Tag::InverseGamma: {
            const double shape = -c.xi;
            const double scale = 2.0 * p.R0 * p.R2 / nu2;
            return shape * std::log(scale) - std::lgamma(shape);
        }
        case Tag::GIG: {
            const double arg = 4.0 * std::sqrt(p.R0 * p.R1 * p.R2) / nu2;
            return 0.5 * c.xi * std::log(p.R1 / (p.R0 * p.R2)) - std::log(2.0) -
                   log_bessel_k(c.xi, arg);
        }
        case Tag::DegenerateZero: break;
    }
    throw DegenerateSteadyState();
}

}  // namespace

Law::Law(const ModelParams& p)
    : class_(classify(p)),
      a_(2.0 * p.R0 * p.R2 / (p.nu * p.nu)),
      b_(2.0 * p.R1 / (p.nu * p.nu)),
      log_c_(log_normalizer(p, class_)) {}

double Law::log_density(double x) const {
    if (!(x > 0.0)) return -std::numeric_limits<double>::infinity();
    return log_c_ + (class_.xi - 1.0) * std::log(x) - a_ / x - b_ * x;
}

double Law::density(double x) const { return std::exp(log_density(x)); }

double log_density(const ModelParams& p, double x) { return Law(p).log_density(x); }

double density(const ModelParams& p, double x) { return Law(p).density(x); }

double mean(const ModelParams& p) {
    const auto c = classify(p);
    switch (c.tag) {
        case Tag::DegenerateZero:
            throw DegenerateSteadyState();
        case Tag::Gamma:
            return p.R2 - p.nu * p.nu / (2.0 * p.R1);
        case Tag::InverseGamma:
            // inverse gamma with shape -xi has a mean iff -xi > 1
            if (!(-c.xi > 1.0))
                throw MomentDoesNotExist("inverse-gamma steady state has no first moment");
            return p.R2;
        case Tag::GIG: {
            const double arg = 4.0 * std::sqrt(p.R0 * p.R1 * p.R2) / (p.nu * p.nu);
            return std::sqrt(p.R0 * p.R2 / p.R1) *
                   std::exp(log_bessel_k(c.xi + 1.0, arg) - log_bessel_k(c.xi, arg));
        }
    }
    throw DegenerateSteadyState();
}

double mean_lower_bound(const ModelParams& p) {
    const auto c = classify(p);
    if (c.tag == Tag::DegenerateZero) throw DegenerateSteadyState();
    if (!(p.R1 > 0.0)) throw InvalidArgument("mean_lower_bound requires R1 > 0");
    const double nu2 = p.nu * p.nu;
    const double alpha = -2.0 * p.R0 * p.R2 / nu2;
    const double beta = -2.0 * p.R1 / nu2;
    const double ratio = c.xi / beta;
    return 0.5 * (-ratio + std::sqrt(ratio * ratio + 4.0 * alpha / beta));
}

}  // namespace qvol::steady_state
