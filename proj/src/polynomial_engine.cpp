#include "qvol/polynomial_engine.hpp"

#include <cmath>
#include <stdexcept>

#include "qvol/errors.hpp"
#include "qvol/matrix_exp.hpp"

namespace qvol {

std::size_t basis_dimension(int m) {
    if (m < 0) throw InvalidArgument("basis degree must be >= 0");
    const auto mm = static_cast<std::size_t>(m);
    return (2 * mm * mm * mm + 9 * mm * mm + 13 * mm + 6) / 6;
}

std::vector<BasisIndex> enumerate_basis(int m) {
    if (m < 0) throw InvalidArgument("basis degree must be >= 0");
    std::vector<BasisIndex> out;
    out.reserve(basis_dimension(m));
    for (int deg = 0; deg <= m; ++deg) {
        for (int alpha = 0; alpha <= deg; ++alpha) {
            for (int gamma = 0; gamma <= 2 * (m - deg); ++gamma) {
                out.push_back({alpha, deg - alpha, gamma});
            }
        }
    }
    return out;
}

MonomialBasis::MonomialBasis(int m) : m_(m), indices_(enumerate_basis(m)) {
    lookup_.reserve(indices_.size());
    for (std::size_t i = 0; i < indices_.size(); ++i) lookup_.emplace(key(indices_[i]), i);
}

std::uint64_t MonomialBasis::key(const BasisIndex& idx) {
    return (static_cast<std::uint64_t>(idx.alpha) << 42) |
           (static_cast<std::uint64_t>(idx.beta) << 21) | static_cast<std::uint64_t>(idx.gamma);
}

bool MonomialBasis::contains(const BasisIndex& idx) const {
    if (idx.alpha < 0 || idx.beta < 0 || idx.gamma < 0) return false;
    return lookup_.count(key(idx)) != 0;
}

std::size_t MonomialBasis::position(const BasisIndex& idx) const {
    if (!contains(idx)) throw std::out_of_range("monomial not in P_m");
    return lookup_.at(key(idx));
}

GeneratorMatrix::GeneratorMatrix(const ModelParams& p, int m)
    : basis_(m),
      entries_(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(basis_.size()),
                                     static_cast<Eigen::Index>(basis_.size()))) {
    const double z = p.z();
    const double rho = p.rho;
    const double nu = p.nu;

    for (std::size_t row = 0; row < basis_.size(); ++row) {
        const auto [a, b, g] = basis_[row];
        const auto r = static_cast<Eigen::Index>(row);
        auto add = [&](double coeff, int da, int db, int dg) {
            if (coeff == 0.0) return;
            const BasisIndex target{a + da, b + db, g + dg};
            // the generator leaves P_m invariant; a miss here is a construction bug
            if (!basis_.contains(target)) throw std::logic_error("generator target outside P_m");
            entries_(r, static_cast<Eigen::Index>(basis_.position(target))) += coeff;
        };
        add(a * (z * rho - 0.5), -1, 0, 2);
        add(b * 0.5 * z * z, 0, -1, 2);
        add(g * p.R0 * p.R2, 0, 0, -1);
        add(g * (p.R1 * p.R2 - p.R0), 0, 0, 0);
        add(0.5 * a * (a - 1), -2, 0, 2);
        add(0.5 * b * (b - 1) * z * z, 0, -2, 2);
        add(0.5 * g * (g - 1) * nu * nu, 0, 0, 0);
        add(a * b * z * rho, -1, -1, 2);
        add(a * g * nu * rho, -1, 0, 1);
        add(b * g * z * nu, 0, -1, 1);
    }
}

Eigen::MatrixXd GeneratorMatrix::propagator(double tau) const {
    if (!(tau >= 0.0)) throw InvalidArgument("horizon must be >= 0");
    return expm(entries_ * tau);
}

GeneratorMatrix build_generator(const ModelParams& params, int m) { return {params, m}; }

Eigen::VectorXd evaluate_basis(const MonomialBasis& basis, const StatePoint& s) {
    Eigen::VectorXd h(static_cast<Eigen::Index>(basis.size()));
    for (std::size_t i = 0; i < basis.size(); ++i) {
        const auto& idx = basis[i];
        h(static_cast<Eigen::Index>(i)) =
            std::pow(s.x, idx.alpha) * std::pow(s.y, idx.beta) * std::pow(s.sigma, idx.gamma);
    }
    return h;
}

Eigen::VectorXd conditional_moments(const GeneratorMatrix& generator, double tau,
                                    const StatePoint& state) {
    const Eigen::VectorXd h = evaluate_basis(generator.basis(), state);
    if (tau == 0.0) return h;
    return generator.propagator(tau) * h;
}

Eigen::VectorXd conditional_moments(const ModelParams& params, int m, double tau,
                                    const StatePoint& state) {
    return conditional_moments(GeneratorMatrix(params, m), tau, state);
}

}  // namespace qvol
