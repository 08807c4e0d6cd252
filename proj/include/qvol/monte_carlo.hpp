#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "qvol/model.hpp"

namespace qvol::mc {

// Q is the pricing measure; Qz removes the quadratic volatility drift and carries the
// log density y with dQz/dQ = exp(y_T).
enum class Measure { Q, Qz };
enum class Scheme { IJK, LogEuler };

std::string_view to_string(Measure measure);
std::string_view to_string(Scheme scheme);
Measure parse_measure(std::string_view text);
Scheme parse_scheme(std::string_view text);

// Paths are generated in fixed batches, each with its own generator seeded from
// (seed, batch index), so results do not depend on the thread count.
inline constexpr std::size_t kBatchSize = 4096;

struct SimulationConfig {
    std::size_t n_paths = 100000;
    int n_steps = 200;
    std::uint64_t seed = 42;
    Measure measure = Measure::Qz;
    Scheme scheme = Scheme::LogEuler;
    int threads = 1;
};

struct TerminalSample {
    Measure measure = Measure::Q;
    std::vector<double> x;      // log-price at T
    std::vector<double> sigma;  // volatility at T
    std::vector<double> y;      // log density at T; empty under Q
    std::size_t floor_events = 0;

    std::size_t size() const { return x.size(); }
};

// Volatility by the chosen scheme; x (and y) exactly Gaussian given the volatility path,
// with the stochastic integral of sigma recovered from the volatility increments
// (LogEuler) or summed directly (IJK).
TerminalSample simulate_terminal(const ModelParams& params, double T,
                                 const SimulationConfig& config);

struct McEstimate {
    double value = 0.0;
    double std_error = 0.0;
    double ci99_half_width = 0.0;  // 2.576 * std_error
    std::size_t n_paths = 0;
    double plain_value = 0.0;
    double plain_std_error = 0.0;
    bool control_variate = false;
    int threads = 1;
};

inline constexpr double kZ99 = 2.576;

using Payoff = std::function<double(double)>;  // F(S)

// Price of F(S_T). Under Qz the discounted payoff exp(-y) F(exp(x)) is regressed on
// {1, x, y, x^2, xy, y^2} and that quadratic, whose expectation is exact from the
// moment engine, serves as control variate. Under Q the control uses {1, x, x^2} and is
// only available when R1 = 0 (then Q and Qz coincide); otherwise the plain estimate.
McEstimate estimate_price(const ModelParams& params, const TerminalSample& sample,
                          const Payoff& payoff, double T);

McEstimate mc_price(const ModelParams& params, const Payoff& payoff, double T,
                    const SimulationConfig& config);

struct MomentComparison {
    Eigen::VectorXd empirical;
    Eigen::VectorXd std_error;
    Eigen::VectorXd analytical;
    double max_standardized_deviation = 0.0;
};

// Empirical Qz means of every P_m basis monomial against exp(G_m T) H_m(x0, 0, sigma0).
MomentComparison compare_moments(const ModelParams& params, int m, double T,
                                 const TerminalSample& sample);
MomentComparison qz_moment_check(const ModelParams& params, int m, double T,
                                 const SimulationConfig& config);

}  // namespace qvol::mc
