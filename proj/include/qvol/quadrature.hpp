#pragma once

#include <cstddef>
#include <vector>

namespace qvol {

// Discrete approximation of a d-dimensional standard normal law.
struct QuadratureRule {
    std::size_t dimension = 1;
    std::vector<std::vector<double>> nodes;  // one d-vector per point
    std::vector<double> weights;             // positive, summing to 1

    std::size_t size() const { return weights.size(); }
};

// Relative weight cut that trims the 15x15 Gauss-Hermite grid from 225 to 185 points by
// dropping the low-weight corners. Any value in (1.4727e-10, 3.3285e-10] gives 185; this
// is the geometric midpoint of that interval.
inline constexpr double kCornerPruneThreshold = 2.2e-10;

// K-point Gauss-Hermite rule for the standard normal (weight exp(-x^2/2)/sqrt(2 pi)),
// exact for polynomials up to degree 2K-1. Golub-Welsch on the Jacobi matrix.
QuadratureRule hermite_rule(int K);

// Tensor product of hermite_rule(K) in d dimensions. Points whose product weight is
// below prune_threshold * (max product weight) are dropped and the remaining weights
// renormalized. Points are ordered lexicographically, first coordinate slowest.
QuadratureRule tensor_rule(int K, int d, double prune_threshold = 0.0);

}  // namespace qvol
