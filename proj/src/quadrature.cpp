#include "qvol/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>

#include "qvol/errors.hpp"

namespace qvol {

QuadratureRule hermite_rule(int K) {
    if (K < 1) throw InvalidArgument("quadrature order must be >= 1");
    const auto n = static_cast<Eigen::Index>(K);
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd sub(std::max<Eigen::Index>(n - 1, 0));
    for (Eigen::Index i = 0; i + 1 < n; ++i) sub(i) = std::sqrt(static_cast<double>(i + 1));

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success) throw Error("Golub-Welsch eigensolver failed");

    std::vector<double> x(K), w(K);
    for (int i = 0; i < K; ++i) {
        x[i] = solver.eigenvalues()(i);
        const double v0 = solver.eigenvectors()(0, i);
        w[i] = v0 * v0;
    }
    // symmetrize: nodes in exact +/- pairs with equal weights, exact 0 for odd K
    QuadratureRule rule;
    rule.dimension = 1;
    rule.nodes.resize(K);
    rule.weights.resize(K);
    for (int i = 0; i < K; ++i) {
        const int j = K - 1 - i;
        const double node = 0.5 * (x[i] - x[j]);
        rule.nodes[i] = {i == j ? 0.0 : node};
        rule.weights[i] = 0.5 * (w[i] + w[j]);
    }
    const double total = std::accumulate(rule.weights.begin(), rule.weights.end(), 0.0);
    for (double& wi : rule.weights) wi /= total;
    return rule;
}

QuadratureRule tensor_rule(int K, int d, double prune_threshold) {
    if (d < 1) throw InvalidArgument("quadrature dimension must be >= 1");
    if (!(prune_threshold >= 0.0 && prune_threshold < 1.0))
        throw InvalidArgument("prune threshold must lie in [0, 1)");
    const QuadratureRule base = hermite_rule(K);

    std::size_t total = 1;
    for (int i = 0; i < d; ++i) total *= static_cast<std::size_t>(K);

    std::vector<std::vector<double>> nodes;
    std::vector<double> weights;
    nodes.reserve(total);
    weights.reserve(total);
    std::vector<int> digits(d, 0);
    for (std::size_t p = 0; p < total; ++p) {
        std::vector<double> point(d);
        double weight = 1.0;
        for (int k = 0; k < d; ++k) {
            point[k] = base.nodes[digits[k]][0];
            weight *= base.weights[digits[k]];
        }
        nodes.push_back(std::move(point));
        weights.push_back(weight);
        for (int k = d - 1; k >= 0; --k) {
            if (++digits[k] < K) break;
            digits[k] = 0;
        }
    }

    const double cut = prune_threshold * *std::max_element(weights.begin(), weights.end());
    QuadratureRule rule;
    rule.dimension = static_cast<std::size_t>(d);
    for (std::size_t p = 0; p < total; ++p) {
        if (weights[p] < cut) continue;
        rule.nodes.push_back(std::move(nodes[p]));
        rule.weights.push_back(weights[p]);
    }
    const double sum = std::accumulate(rule.weights.begin(), rule.weights.end(), 0.0);
    for (double& w : rule.weights) w /= sum;
    return rule;
}

}  // namespace qvol
