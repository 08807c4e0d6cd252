#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "qvol/auxiliary_density.hpp"

namespace qvol {

// Monomials x^alpha y^beta with alpha + beta <= n, ordered by alpha+beta, then alpha.
// Matches the (alpha, beta, 0) sub-basis order of MonomialBasis.
class BivariateBasis {
public:
    struct Exponent {
        int alpha;
        int beta;
    };

    explicit BivariateBasis(int n);

    int degree() const { return n_; }
    std::size_t size() const { return exponents_.size(); }
    const Exponent& operator[](std::size_t i) const { return exponents_[i]; }
    const std::vector<Exponent>& exponents() const { return exponents_; }

    // Number of monomials of total degree <= j, i.e. (j+1)(j+2)/2; the leading block.
    static std::size_t leading_size(int j);

private:
    int n_;
    std::vector<Exponent> exponents_;
};

// E[X^j], j = 0..n_max, for X ~ N(mu, var): exp(G) e_0 with G the nilpotent generator
// matrix of dX = mu dt + sqrt(var) dW acting on (1, x, ..., x^n_max).
Eigen::VectorXd gaussian_moments(double mu, double var, int n_max);

// D_ij = sum_k w_k y_k^(beta_i+beta_j) E[X_k^(alpha_i+alpha_j)], X_k ~ N(m_k, v_k).
Eigen::MatrixXd gram_matrix(const std::vector<MixtureComponent>& mixture,
                            const BivariateBasis& basis);

// I_j = int (e^x - K)^+ x^j N(x; m, v) dx for j = 0..n_max via the joint (I, J) recursion.
// Requires v > 0.
std::vector<double> call_integrals(double m, double v, double strike, int n_max);

// f_i = sum_k w_k e^(-y_k) y_k^beta_i I_alpha_i^(k) for the call payoff (S - K)^+.
// Components with v_k = 0 contribute their point evaluation.
Eigen::VectorXd call_payoff_vector(const std::vector<MixtureComponent>& mixture,
                                   const BivariateBasis& basis, double strike);

// Put payoff (K - S)^+ through per-component parity: (K - e^x)^+ = (e^x - K)^+ - e^x + K.
Eigen::VectorXd put_payoff_vector(const std::vector<MixtureComponent>& mixture,
                                  const BivariateBasis& basis, double strike);

using PayoffFunction = std::function<double(double)>;  // F(S)

// Same as call_payoff_vector for an arbitrary payoff, each Gaussian integral by
// Gauss-Hermite of order quad_order. Throws NonFiniteIntegrand if F is not finite at a node.
Eigen::VectorXd generic_payoff_vector(const std::vector<MixtureComponent>& mixture,
                                      const BivariateBasis& basis, const PayoffFunction& payoff,
                                      int quad_order);

struct ProjectionSolution {
    Eigen::VectorXd coefficients;
    // Tikhonov shift, relative to the unit diagonal of the equilibrated Gram matrix.
    double regularization = 0.0;
};

// Solves D c = f. D is symmetrically equilibrated to unit diagonal, then Cholesky is
// attempted with shifts lambda in {0, 1e-14, 1e-12, 1e-10}; throws SingularGram if all fail.
ProjectionSolution solve(const Eigen::MatrixXd& gram, const Eigen::VectorXd& payoff);

}  // namespace qvol
