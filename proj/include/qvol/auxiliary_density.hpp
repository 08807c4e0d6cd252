#pragma once

#include <cstddef>
#include <vector>

#include "qvol/model.hpp"

namespace qvol {

// One term w * N(x; m, v) * delta(y - y0) of the Gaussian-mixture proxy for the law of
// (x_T, y_T) under the drift-free measure.
struct MixtureComponent {
    double w = 0.0;  // weight
    double m = 0.0;  // mean of x
    double v = 0.0;  // variance of x
    double y = 0.0;  // point mass location in y
};

struct Mixture {
    std::vector<MixtureComponent> components;
    // Number of IJK steps whose volatility went negative and was floored at zero.
    std::size_t sigma_floor_events = 0;

    std::size_t size() const { return components.size(); }
};

// State of the IJK recursion along one quadrature path.
struct IJKState {
    double sigma = 0.0;     // discretized volatility
    double mean = 0.0;      // running conditional mean of x
    double variance = 0.0;  // running conditional variance of x
    double y = 0.0;         // running log Radon-Nikodym state
    std::size_t floor_events = 0;
};

// One step of size delta driven by the standard normal draw Z. A negative volatility is
// floored at zero (and counted) before it enters the trapezoidal sigma^2 average.
IJKState ijk_step(const ModelParams& params, const IJKState& state, double Z, double delta);

// Runs d IJK steps of size T/d along every point of the d-dimensional Gauss-Hermite grid
// with K points per axis, pruned at prune_threshold. Deterministic.
Mixture build_mixture(const ModelParams& params, double T, int d, int K,
                      double prune_threshold = 0.0);

}  // namespace qvol
