#include "qvol/projection.hpp"

#include <cmath>
#include <numbers>

#include "qvol/errors.hpp"
#include "qvol/quadrature.hpp"
#include "qvol/special.hpp"

namespace qvol {

BivariateBasis::BivariateBasis(int n) : n_(n) {
    if (n < 0) throw InvalidArgument("basis degree must be >= 0");
    exponents_.reserve(leading_size(n));
    for (int deg = 0; deg <= n; ++deg) {
        for (int alpha = 0; alpha <= deg; ++alpha) exponents_.push_back({alpha, deg - alpha});
    }
}

std::size_t BivariateBasis::leading_size(int j) {
    const auto jj = static_cast<std::size_t>(j);
    return (jj + 1) * (jj + 2) / 2;
}

Eigen::VectorXd gaussian_moments(double mu, double var, int n_max) {
    if (!(var >= 0.0)) throw InvalidArgument("variance must be >= 0");
    if (n_max < 0) throw InvalidArgument("moment order must be >= 0");
    const Eigen::Index n = n_max + 1;
    Eigen::VectorXd out(n);
    if (var == 0.0) {
        for (Eigen::Index j = 0; j < n; ++j) out(j) = std::pow(mu, static_cast<double>(j));
        return out;
    }
    // G is strictly lower triangular, so exp(G) e_0 = sum_{k<=n_max} G^k e_0 / k! exactly.
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index j = 1; j < n; ++j) {
        g(j, j - 1) = static_cast<double>(j) * mu;
        if (j >= 2) g(j, j - 2) = 0.5 * static_cast<double>(j * (j - 1)) * var;
    }
    Eigen::VectorXd term = Eigen::VectorXd::Unit(n, 0);
    out = term;
    for (Eigen::Index k = 1; k < n; ++k) {
        term = g * term / static_cast<double>(k);
        out += term;
    }
    return out;
}

Eigen::MatrixXd gram_matrix(const std::vector<MixtureComponent>& mixture,
                            const BivariateBasis& basis) {
    if (mixture.empty()) throw InvalidArgument("mixture must not be empty");
    const auto size = static_cast<Eigen::Index>(basis.size());
    const int n = basis.degree();
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(size, size);
    std::vector<double> y_powers(2 * n + 1);
    for (const auto& c : mixture) {
        const Eigen::VectorXd moments = gaussian_moments(c.m, c.v, 2 * n);
        y_powers[0] = 1.0;
        for (int j = 1; j <= 2 * n; ++j) y_powers[j] = y_powers[j - 1] * c.y;
        for (Eigen::Index i = 0; i < size; ++i) {
            const auto& ei = basis[i];
            for (Eigen::Index j = 0; j <= i; ++j) {
                const auto& ej = basis[j];
                gram(i, j) += c.w * y_powers[ei.beta + ej.beta] * moments(ei.alpha + ej.alpha);
            }
        }
    }
    gram.triangularView<Eigen::StrictlyUpper>() = gram.transpose();
    return gram;
}

std::vector<double> call_integrals(double m, double v, double strike, int n_max) {
    if (!(strike > 0.0)) throw InvalidArgument("strike must be > 0");
    if (!(v > 0.0)) throw InvalidArgument("call_integrals requires a positive variance");
    // Forward recursion loses relative accuracy when I_n decays faster than the dominant
    // solution (|m| > |log K|); extended precision keeps n <= 10 well inside 1e-10.
    using real = long double;
    const real mm = m, vv = v, kk = strike;
    const real log_k = std::log(kk);
    const real sd = std::sqrt(vv);
    const real xi = (mm - log_k) / sd;
    const real sqrt2 = std::sqrt(static_cast<real>(2));
    auto cdf = [&](real x) { return 0.5L * std::erfc(-x / sqrt2); };
    const real density_at_xi = std::exp(-0.5L * xi * xi) / std::sqrt(2.0L * std::numbers::pi_v<real>);

    std::vector<real> I(n_max + 1), J(n_max + 1);
    I[0] = std::exp(mm + 0.5L * vv) * cdf(xi + sd) - kk * cdf(xi);
    J[0] = cdf(xi);
    real log_k_power = 1.0L;  // log(K)^(j-1)
    for (int j = 1; j <= n_max; ++j) {
        const real I2 = j >= 2 ? I[j - 2] : 0.0L;
        const real J2 = j >= 2 ? J[j - 2] : 0.0L;
        I[j] = (mm + vv) * I[j - 1] + vv * (j - 1) * I2 + kk * vv * J[j - 1];
        J[j] = mm * J[j - 1] + vv * (j - 1) * J2 + sd * log_k_power * density_at_xi;
        log_k_power *= log_k;
    }
    return std::vector<double>(I.begin(), I.end());
}

namespace {

// f_i accumulation given per-component integrals int F(e^x) x^a N(x; m, v) dx, a = 0..n.
template <class ComponentIntegrals>
Eigen::VectorXd assemble_payoff(const std::vector<MixtureComponent>& mixture,
                                const BivariateBasis& basis, ComponentIntegrals integrals) {
    if (mixture.empty()) throw InvalidArgument("mixture must not be empty");
    const int n = basis.degree();
    Eigen::VectorXd f = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis.size()));
    std::vector<double> y_powers(n + 1);
    for (const auto& c : mixture) {
        const std::vector<double> values = integrals(c, n);
        y_powers[0] = 1.0;
        for (int j = 1; j <= n; ++j) y_powers[j] = y_powers[j - 1] * c.y;
        const double scale = c.w * std::exp(-c.y);
        for (std::size_t i = 0; i < basis.size(); ++i) {
            f(static_cast<Eigen::Index>(i)) +=
                scale * y_powers[basis[i].beta] * values[basis[i].alpha];
        }
    }
    return f;
}

}  // namespace

Eigen::VectorXd call_payoff_vector(const std::vector<MixtureComponent>& mixture,
                                   const BivariateBasis& basis, double strike) {
    if (!(strike > 0.0)) throw InvalidArgument("strike must be > 0");
    return assemble_payoff(mixture, basis, [&](const MixtureComponent& c, int n) {
        if (c.v > 0.0) return call_integrals(c.m, c.v, strike, n);
        // point mass in x
        std::vector<double> values(n + 1);
        const double intrinsic = std::max(std::exp(c.m) - strike, 0.0);
        for (int a = 0; a <= n; ++a) values[a] = intrinsic * std::pow(c.m, a);
        return values;
    });
}

Eigen::VectorXd put_payoff_vector(const std::vector<MixtureComponent>& mixture,
                                  const BivariateBasis& basis, double strike) {
    if (!(strike > 0.0)) throw InvalidArgument("strike must be > 0");
    return assemble_payoff(mixture, basis, [&](const MixtureComponent& c, int n) {
        std::vector<double> values(n + 1);
        if (c.v == 0.0) {
            const double intrinsic = std::max(strike - std::exp(c.m), 0.0);
            for (int a = 0; a <= n; ++a) values[a] = intrinsic * std::pow(c.m, a);
            return values;
        }
        // int e^x x^a N(x; m, v) dx = e^(m + v/2) E[X'^a], X' ~ N(m + v, v)
        const std::vector<double> calls = call_integrals(c.m, c.v, strike, n);
        const Eigen::VectorXd tilted = gaussian_moments(c.m + c.v, c.v, n);
        const Eigen::VectorXd plain = gaussian_moments(c.m, c.v, n);
        const double forward = std::exp(c.m + 0.5 * c.v);
        for (int a = 0; a <= n; ++a) values[a] = calls[a] - forward * tilted(a) + strike * plain(a);
        return values;
    });
}

Eigen::VectorXd generic_payoff_vector(const std::vector<MixtureComponent>& mixture,
                                      const BivariateBasis& basis, const PayoffFunction& payoff,
                                      int quad_order) {
    const QuadratureRule rule = hermite_rule(quad_order);
    auto checked = [&](double s) {
        const double value = payoff(s);
        if (!std::isfinite(value)) throw NonFiniteIntegrand("payoff is not finite at S = " + std::to_string(s));
        return value;
    };
    return assemble_payoff(mixture, basis, [&](const MixtureComponent& c, int n) {
        std::vector<double> values(n + 1, 0.0);
        if (c.v == 0.0) {
            const double fv = checked(std::exp(c.m));
            for (int a = 0; a <= n; ++a) values[a] = fv * std::pow(c.m, a);
            return values;
        }
        const double sd = std::sqrt(c.v);
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const double x = c.m + sd * rule.nodes[q][0];
            double term = rule.weights[q] * checked(std::exp(x));
            for (int a = 0; a <= n; ++a) {
                values[a] += term;
                term *= x;
            }
        }
        return values;
    });
}

ProjectionSolution solve(const Eigen::MatrixXd& gram, const Eigen::VectorXd& payoff) {
    const Eigen::Index n = gram.rows();
    if (n != gram.cols() || n != payoff.size()) throw InvalidArgument("solve dimension mismatch");
    if (!gram.allFinite() || !payoff.allFinite()) throw SingularGram("non-finite Gram system");

    // Basis functions that vanish under the mixture (e.g. powers of y when y is identically
    // zero) have a zero row; their coefficient is set to 0.
    std::vector<Eigen::Index> active;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (gram(i, i) > 0.0) {
            active.push_back(i);
        } else if (gram(i, i) < 0.0 || payoff(i) != 0.0) {
            throw SingularGram("Gram matrix has a non-positive diagonal");
        }
    }
    if (active.empty()) throw SingularGram("Gram matrix is zero");
    const auto n_active = static_cast<Eigen::Index>(active.size());

    Eigen::VectorXd scale(n_active);
    for (Eigen::Index i = 0; i < n_active; ++i) scale(i) = 1.0 / std::sqrt(gram(active[i], active[i]));
    Eigen::MatrixXd equilibrated(n_active, n_active);
    Eigen::VectorXd rhs(n_active);
    for (Eigen::Index i = 0; i < n_active; ++i) {
        rhs(i) = scale(i) * payoff(active[i]);
        for (Eigen::Index j = 0; j < n_active; ++j)
            equilibrated(i, j) = scale(i) * gram(active[i], active[j]) * scale(j);
    }

    for (const double lambda : {0.0, 1e-14, 1e-12, 1e-10}) {
        Eigen::MatrixXd shifted = equilibrated;
        shifted.diagonal().array() += lambda;
        Eigen::LLT<Eigen::MatrixXd> llt(shifted);
        if (llt.info() != Eigen::Success) continue;
        Eigen::VectorXd c = llt.solve(rhs);
        c += llt.solve(rhs - shifted * c);  // one step of iterative refinement
        if (!c.allFinite()) continue;
        Eigen::VectorXd full = Eigen::VectorXd::Zero(n);
        for (Eigen::Index i = 0; i < n_active; ++i) full(active[i]) = scale(i) * c(i);
        return {full, lambda};
    }
    throw SingularGram("Gram matrix is numerically singular after regularization");
}

}  // namespace qvol
