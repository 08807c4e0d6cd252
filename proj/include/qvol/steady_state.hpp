#pragma once

#include <string_view>

#include "qvol/model.hpp"

namespace qvol::steady_state {

// Long-run law of sigma: density proportional to
//   x^(xi-1) exp(-2 R0 R2 / (nu^2 x) - 2 R1 x / nu^2),   xi = -2 (R0 - R1 R2) / nu^2 - 1.
enum class Tag { DegenerateZero, InverseGamma, Gamma, GIG };

std::string_view to_string(Tag tag);

struct Classification {
    Tag tag;
    double xi;
};

Classification classify(const ModelParams& params);

// Normalized steady-state density. Throws DegenerateSteadyState when sigma -> 0.
double density(const ModelParams& params, double x);
double log_density(const ModelParams& params, double x);

// Density with its normalizing constant computed once; use for repeated evaluation.
class Law {
public:
    explicit Law(const ModelParams& params);
    const Classification& classification() const { return class_; }
    double log_density(double x) const;
    double density(double x) const;
    double operator()(double x) const { return density(x); }

private:
    Classification class_;
    double a_;  // coefficient of -1/x
    double b_;  // coefficient of -x
    double log_c_;
};

double mean(const ModelParams& params);

// Special-function-free lower bound on the mean from Jensen's inequality applied to 1/x.
// Requires R1 > 0 and a non-degenerate steady state.
double mean_lower_bound(const ModelParams& params);

}  // namespace qvol::steady_state
