#include "qvol/pricer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include <json.hpp>

#include "qvol/black_scholes.hpp"
#include "qvol/errors.hpp"
#include "qvol/polynomial_engine.hpp"

namespace qvol {

double evaluate_payoff(const PayoffSpec& payoff, double spot) {
    if (const auto* call = std::get_if<CallPayoff>(&payoff)) return std::max(spot - call->strike, 0.0);
    if (const auto* put = std::get_if<PutPayoff>(&payoff)) return std::max(put->strike - spot, 0.0);
    return std::get<GenericPayoff>(payoff).function(spot);
}

Eigen::VectorXd expansion_moments(const ModelParams& params, int n, double T) {
    const GeneratorMatrix generator(params, n);
    const Eigen::VectorXd all = conditional_moments(generator, T, {params.x0, 0.0, params.sigma0});
    const BivariateBasis basis(n);
    Eigen::VectorXd out(static_cast<Eigen::Index>(basis.size()));
    for (std::size_t i = 0; i < basis.size(); ++i) {
        out(static_cast<Eigen::Index>(i)) =
            all(static_cast<Eigen::Index>(generator.basis().position({basis[i].alpha, basis[i].beta, 0})));
    }
    return out;
}

namespace {

void check_request(const PricingRequest& r) {
    require_valid(r.params);
    if (!(r.T > 0.0)) throw InvalidArgument("maturity must be > 0");
    if (r.n < 0) throw InvalidArgument("expansion degree must be >= 0");
    if (r.d < 1) throw InvalidArgument("number of IJK steps must be >= 1");
    if (r.K < 1) throw InvalidArgument("quadrature points must be >= 1");
}

Eigen::VectorXd payoff_vector(const PayoffSpec& payoff, const Mixture& mixture,
                              const BivariateBasis& basis) {
    if (const auto* call = std::get_if<CallPayoff>(&payoff))
        return call_payoff_vector(mixture.components, basis, call->strike);
    if (const auto* put = std::get_if<PutPayoff>(&payoff))
        return put_payoff_vector(mixture.components, basis, put->strike);
    const auto& generic = std::get<GenericPayoff>(payoff);
    return generic_payoff_vector(mixture.components, basis, generic.function, generic.quad_order);
}

double call_equivalent(const PayoffSpec& payoff, double value, double spot) {
    if (const auto* put = std::get_if<PutPayoff>(&payoff)) return value + spot - put->strike;
    return value;
}

}  // namespace

PriceResult price(const PricingRequest& request) {
    check_request(request);
    const auto& params = request.params;
    const Mixture mixture = build_mixture(params, request.T, request.d, request.K,
                                          request.prune_threshold);
    const BivariateBasis basis(request.n);
    const Eigen::MatrixXd gram = gram_matrix(mixture.components, basis);
    const Eigen::VectorXd f = payoff_vector(request.payoff, mixture, basis);
    const Eigen::VectorXd moments = expansion_moments(params, request.n, request.T);

    PriceResult result;
    result.mixture_size = mixture.size();
    result.martingale = is_martingale(params);
    result.sigma_floor_events = mixture.sigma_floor_events;
    for (int j = 0; j <= request.n; ++j) {
        const auto size = static_cast<Eigen::Index>(BivariateBasis::leading_size(j));
        const auto solution = solve(gram.topLeftCorner(size, size), f.head(size));
        result.pi_by_degree.push_back(solution.coefficients.dot(moments.head(size)));
        result.regularization_used = std::max(result.regularization_used, solution.regularization);
    }

    const bool vanilla = !std::holds_alternative<GenericPayoff>(request.payoff);
    if (vanilla && result.martingale) {
        const double spot = std::exp(params.x0);
        const double strike = std::holds_alternative<CallPayoff>(request.payoff)
                                  ? std::get<CallPayoff>(request.payoff).strike
                                  : std::get<PutPayoff>(request.payoff).strike;
        std::vector<double> vols;
        for (double value : result.pi_by_degree) {
            try {
                vols.push_back(implied_vol(call_equivalent(request.payoff, value, spot), spot,
                                           strike, request.T));
            } catch (const OutOfBounds&) {
                vols.push_back(std::numeric_limits<double>::quiet_NaN());
            }
        }
        result.implied_vol_by_degree = std::move(vols);
    }
    return result;
}

namespace {

nlohmann::json number_or_null(double v) {
    if (std::isfinite(v)) return v;
    return nullptr;
}

}  // namespace

std::string to_json(const PriceResult& result) {
    nlohmann::json j;
    j["pi_by_degree"] = result.pi_by_degree;
    if (result.implied_vol_by_degree) {
        auto vols = nlohmann::json::array();
        for (double v : *result.implied_vol_by_degree) vols.push_back(number_or_null(v));
        j["implied_vol_by_degree"] = vols;
    } else {
        j["implied_vol_by_degree"] = nullptr;
    }
    j["mixture_size"] = result.mixture_size;
    j["regularization_used"] = result.regularization_used;
    j["martingale"] = result.martingale;
    j["sigma_floor_events"] = result.sigma_floor_events;
    return j.dump(2);
}

std::vector<ConvergenceRow> convergence_table(const ConvergenceRequest& request) {
    if (request.n_max < 1) throw InvalidArgument("n_max must be >= 1");
    require_valid(request.params);
    std::vector<ConvergenceRow> rows;
    for (double T : request.maturities) {
        std::optional<mc::TerminalSample> sample;
        if (request.with_mc) sample = mc::simulate_terminal(request.params, T, request.mc);
        for (double log_strike : request.log_strikes) {
            const double strike = std::exp(log_strike);
            PricingRequest pr{request.params, CallPayoff{strike}, T, request.n_max, request.d,
                              request.K,      request.prune_threshold};
            const PriceResult result = price(pr);
            mc::McEstimate benchmark;
            if (sample) {
                benchmark = mc::estimate_price(
                    request.params, *sample,
                    [strike](double s) { return std::max(s - strike, 0.0); }, T);
            }
            for (int n = 1; n <= request.n_max; ++n) {
                ConvergenceRow row;
                row.T = T;
                row.strike = strike;
                row.n = n;
                row.price = result.pi_by_degree[static_cast<std::size_t>(n)];
                row.implied_vol = result.implied_vol_by_degree
                                      ? (*result.implied_vol_by_degree)[static_cast<std::size_t>(n)]
                                      : std::numeric_limits<double>::quiet_NaN();
                if (sample) {
                    row.mc_price = benchmark.value;
                    row.mc_ci_half_width = benchmark.ci99_half_width;
                    row.inside_ci = std::fabs(row.price - benchmark.value) <= benchmark.ci99_half_width;
                } else {
                    row.mc_price = row.mc_ci_half_width = std::numeric_limits<double>::quiet_NaN();
                }
                rows.push_back(row);
            }
        }
    }
    return rows;
}

std::string to_csv(const std::vector<ConvergenceRow>& rows) {
    std::string out = "T,strike,n,price,implied_vol,mc_price,mc_ci_half_width,inside_ci\n";
    char buf[256];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%d,%.17g,%.17g,%.17g,%.17g,%d\n", r.T, r.strike,
                      r.n, r.price, r.implied_vol, r.mc_price, r.mc_ci_half_width,
                      r.inside_ci ? 1 : 0);
        out += buf;
    }
    return out;
}

}  // namespace qvol
