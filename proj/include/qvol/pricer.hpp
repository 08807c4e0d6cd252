#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "qvol/model.hpp"
#include "qvol/monte_carlo.hpp"
#include "qvol/projection.hpp"

namespace qvol {

struct CallPayoff {
    double strike;
};

struct PutPayoff {
    double strike;
};

struct GenericPayoff {
    PayoffFunction function;
    int quad_order = 100;
};

using PayoffSpec = std::variant<CallPayoff, PutPayoff, GenericPayoff>;

double evaluate_payoff(const PayoffSpec& payoff, double spot);

struct PricingRequest {
    ModelParams params;
    PayoffSpec payoff = CallPayoff{1.0};
    double T = 1.0;
    int n = 10;                   // expansion degree
    int d = 1;                    // IJK steps for the auxiliary density
    int K = 15;                   // quadrature points per dimension
    double prune_threshold = 0.0;
};

struct PriceResult {
    std::vector<double> pi_by_degree;  // pi_0 .. pi_n
    std::optional<std::vector<double>> implied_vol_by_degree;  // NaN where not invertible
    std::size_t mixture_size = 0;
    double regularization_used = 0.0;  // largest Tikhonov shift over all degrees
    bool martingale = true;            // false: prices are not arbitrage-free
    std::size_t sigma_floor_events = 0;
};

// E[x_T^alpha y_T^beta] under the drift-free measure for every monomial of
// BivariateBasis(n), read off exp(G_n T) H_n(x0, 0, sigma0).
Eigen::VectorXd expansion_moments(const ModelParams& params, int n, double T);

// pi_j = c_j . moments_j for j = 0..n, where c_j projects exp(-y) F(e^x) on the degree-j
// bivariate monomials under the mixture. All degrees share one Gram matrix and moment
// vector because the bases are nested.
PriceResult price(const PricingRequest& request);

std::string to_json(const PriceResult& result);

struct ConvergenceRequest {
    ModelParams params;
    std::vector<double> maturities;
    std::vector<double> log_strikes;  // strike = exp(log_strike)
    int n_max = 10;
    int d = 1;
    int K = 15;
    double prune_threshold = 0.0;
    bool with_mc = true;
    mc::SimulationConfig mc;
};

struct ConvergenceRow {
    double T = 0.0;
    double strike = 0.0;
    int n = 0;
    double price = 0.0;
    double implied_vol = 0.0;
    double mc_price = 0.0;
    double mc_ci_half_width = 0.0;
    bool inside_ci = false;
};

// Call prices for n = 1..n_max on the (maturity, strike) grid next to a control-variate
// Monte-Carlo benchmark. One simulation per maturity serves all strikes.
std::vector<ConvergenceRow> convergence_table(const ConvergenceRequest& request);

// Fixed column order: T,strike,n,price,implied_vol,mc_price,mc_ci_half_width,inside_ci
std::string to_csv(const std::vector<ConvergenceRow>& rows);

}  // namespace qvol
