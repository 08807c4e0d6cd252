#pragma once

#include <cstddef>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "qvol/model.hpp"

namespace qvol {

// Exponents of the monomial x^alpha y^beta sigma^gamma.
struct BasisIndex {
    int alpha = 0;
    int beta = 0;
    int gamma = 0;

    friend bool operator==(const BasisIndex&, const BasisIndex&) = default;
};

// Dimension of P_m = { p(x,y) q(sigma) : deg p <= m, deg q <= 2 (m - deg p) }.
std::size_t basis_dimension(int m);

// Monomial basis of P_m ordered by alpha+beta, then alpha, then beta, then gamma.
// Every matrix row, moment vector and coefficient vector in the library uses this order.
std::vector<BasisIndex> enumerate_basis(int m);

class MonomialBasis {
public:
    explicit MonomialBasis(int m);

    int degree() const { return m_; }
    std::size_t size() const { return indices_.size(); }
    const std::vector<BasisIndex>& indices() const { return indices_; }
    const BasisIndex& operator[](std::size_t i) const { return indices_[i]; }

    bool contains(const BasisIndex& idx) const;
    // Position of idx in the basis; throws std::out_of_range when idx is not in P_m.
    std::size_t position(const BasisIndex& idx) const;

private:
    static std::uint64_t key(const BasisIndex& idx);

    int m_;
    std::vector<BasisIndex> indices_;
    std::unordered_map<std::uint64_t, std::size_t> lookup_;
};

// Point of the augmented state (x, y, sigma); y starts at 0.
struct StatePoint {
    double x = 0.0;
    double y = 0.0;
    double sigma = 0.0;
};

// Matrix of the generator of (x, y, sigma) under the measure without quadratic drift,
// acting on the monomial basis of P_m: row i holds the coefficients of G(basis[i]).
class GeneratorMatrix {
public:
    GeneratorMatrix(const ModelParams& params, int m);

    int degree() const { return basis_.degree(); }
    const MonomialBasis& basis() const { return basis_; }
    const Eigen::MatrixXd& entries() const { return entries_; }

    // exp(G tau); throws NumericalOverflow when the exponential is not finite.
    Eigen::MatrixXd propagator(double tau) const;

private:
    MonomialBasis basis_;
    Eigen::MatrixXd entries_;
};

GeneratorMatrix build_generator(const ModelParams& params, int m);

// H_m(state): every basis monomial evaluated at state.
Eigen::VectorXd evaluate_basis(const MonomialBasis& basis, const StatePoint& state);

// E[H_m(x_{t+tau}, y_{t+tau}, sigma_{t+tau}) | state] = exp(G_m tau) H_m(state).
Eigen::VectorXd conditional_moments(const GeneratorMatrix& generator, double tau,
                                    const StatePoint& state);
Eigen::VectorXd conditional_moments(const ModelParams& params, int m, double tau,
                                    const StatePoint& state);

}  // namespace qvol
