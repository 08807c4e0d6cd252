#include "qvol/auxiliary_density.hpp"

#include <cmath>

#include "qvol/errors.hpp"
#include "qvol/quadrature.hpp"

namespace qvol {

IJKState ijk_step(const ModelParams& p, const IJKState& s, double Z, double delta) {
    if (!(delta > 0.0)) throw InvalidArgument("IJK step size must be > 0");
    const double z = p.z();
    const double sqrt_dt = std::sqrt(delta);
    const double nu2 = p.nu * p.nu;

    IJKState next;
    next.floor_events = s.floor_events;
    next.sigma = s.sigma + (p.R0 * p.R2 + s.sigma * (p.R1 * p.R2 - p.R0)) * delta +
                 p.nu * s.sigma * sqrt_dt * Z + 0.5 * nu2 * s.sigma * (delta * Z * Z - delta);
    if (next.sigma < 0.0) {
        next.sigma = 0.0;
        ++next.floor_events;
    }
    const double avg_var = 0.5 * (next.sigma * next.sigma + s.sigma * s.sigma);
    const double diffusion = s.sigma * sqrt_dt * Z;
    next.mean = s.mean + (-0.5 + z * p.rho) * avg_var * delta + p.rho * diffusion;
    next.variance = s.variance + (1.0 - p.rho * p.rho) * avg_var * delta;
    next.y = s.y + 0.5 * z * z * avg_var * delta + z * diffusion;
    return next;
}

Mixture build_mixture(const ModelParams& params, double T, int d, int K, double prune_threshold) {
    if (!(T > 0.0)) throw InvalidArgument("maturity must be > 0");
    const QuadratureRule rule = tensor_rule(K, d, prune_threshold);
    const double delta = T / d;

    Mixture mixture;
    mixture.components.reserve(rule.size());
    for (std::size_t k = 0; k < rule.size(); ++k) {
        IJKState state{params.sigma0, params.x0, 0.0, 0.0, 0};
        for (int step = 0; step < d; ++step) {
            state = ijk_step(params, state, rule.nodes[k][step], delta);
        }
        mixture.sigma_floor_events += state.floor_events;
        mixture.components.push_back({rule.weights[k], state.mean, state.variance, state.y});
    }
    return mixture;
}

}  // namespace qvol
