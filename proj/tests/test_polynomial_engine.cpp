#include <cmath>
#include <set>
#include <tuple>

#include <gtest/gtest.h>

#include "qvol/errors.hpp"
#include "qvol/monte_carlo.hpp"
#include "qvol/polynomial_engine.hpp"

using namespace qvol;

namespace {

ModelParams reference() { return {5.0, 5.0, 0.2, 1.0, -0.5, 0.2, 0.0}; }

// Brute-force count of P_m: all (alpha, beta, gamma) in a box satisfying the constraints.
std::size_t count_by_enumeration(int m) {
    std::size_t n = 0;
    for (int a = 0; a <= m; ++a)
        for (int b = 0; b <= m; ++b)
            for (int g = 0; g <= 2 * m; ++g)
                if (a + b <= m && g <= 2 * (m - a - b)) ++n;
    return n;
}

double entry(const GeneratorMatrix& g, BasisIndex row, BasisIndex col) {
    const auto& b = g.basis();
    return g.entries()(static_cast<Eigen::Index>(b.position(row)), static_cast<Eigen::Index>(b.position(col)));
}

int nonzeros_in_row(const GeneratorMatrix& g, BasisIndex row) {
    const auto i = static_cast<Eigen::Index>(g.basis().position(row));
    return static_cast<int>((g.entries().row(i).array() != 0.0).count());
}

// Generator applied to x^a y^b s^g at a point, directly from the Qz dynamics
//   dx = (z rho - 1/2) s^2 dt + s (rho dW + ...),   dy = z^2 s^2 / 2 dt + z s dW,
//   ds = (R0 R2 + s (R1 R2 - R0)) dt + nu s dW.
double generator_at(const ModelParams& p, const BasisIndex& e, double x, double y, double s) {
    const double z = p.z();
    auto mono = [&](int a, int b, int g) {
        if (a < 0 || b < 0 || g < 0) return 0.0;
        return std::pow(x, a) * std::pow(y, b) * std::pow(s, g);
    };
    const int a = e.alpha, b = e.beta, g = e.gamma;
    double out = 0.0;
    out += a * mono(a - 1, b, g) * (z * p.rho - 0.5) * s * s;
    out += b * mono(a, b - 1, g) * 0.5 * z * z * s * s;
    out += g * mono(a, b, g - 1) * (p.R0 * p.R2 + s * (p.R1 * p.R2 - p.R0));
    out += 0.5 * a * (a - 1) * mono(a - 2, b, g) * s * s;
    out += 0.5 * b * (b - 1) * mono(a, b - 2, g) * z * z * s * s;
    out += 0.5 * g * (g - 1) * mono(a, b, g - 2) * p.nu * p.nu * s * s;
    out += a * b * mono(a - 1, b - 1, g) * p.rho * z * s * s;
    out += a * g * mono(a - 1, b, g - 1) * p.rho * p.nu * s * s;
    out += b * g * mono(a, b - 1, g - 1) * z * p.nu * s * s;
    return out;
}

}  // namespace

TEST(Dimension, SmallDegrees) {
    EXPECT_EQ(basis_dimension(0), 1u);
    EXPECT_EQ(basis_dimension(1), 5u);
    EXPECT_EQ(basis_dimension(2), 14u);
    EXPECT_EQ(basis_dimension(3), 30u);
    EXPECT_EQ(basis_dimension(10), 506u);
}

TEST(Dimension, MatchesEnumeration) {
    for (int m = 0; m <= 12; ++m) {
        EXPECT_EQ(basis_dimension(m), count_by_enumeration(m)) << m;
        EXPECT_EQ(enumerate_basis(m).size(), basis_dimension(m)) << m;
    }
}

TEST(Basis, DegreeZeroAndOne) {
    const auto b0 = enumerate_basis(0);
    ASSERT_EQ(b0.size(), 1u);
    EXPECT_EQ(b0[0], (BasisIndex{0, 0, 0}));

    const auto b1 = enumerate_basis(1);
    const std::vector<BasisIndex> expected{{0, 0, 0}, {0, 0, 1}, {0, 0, 2}, {0, 1, 0}, {1, 0, 0}};
    EXPECT_EQ(b1, expected);
    const MonomialBasis basis(1);
    EXPECT_TRUE(basis.contains({0, 0, 2}));
    EXPECT_FALSE(basis.contains({1, 0, 1}));
    EXPECT_THROW(basis.position({1, 0, 1}), std::out_of_range);
}

TEST(Basis, GradedOrderAndConstraint) {
    for (int m = 0; m <= 8; ++m) {
        const auto b = enumerate_basis(m);
        std::set<std::tuple<int, int, int>> seen;
        for (std::size_t i = 0; i < b.size(); ++i) {
            EXPECT_LE(b[i].alpha + b[i].beta, m);
            EXPECT_LE(b[i].gamma, 2 * (m - b[i].alpha - b[i].beta));
            EXPECT_TRUE(seen.insert({b[i].alpha, b[i].beta, b[i].gamma}).second);
            if (i > 0) {
                const auto key = [](const BasisIndex& e) {
                    return std::make_tuple(e.alpha + e.beta, e.alpha, e.beta, e.gamma);
                };
                EXPECT_LT(key(b[i - 1]), key(b[i]));
            }
        }
        const MonomialBasis basis(m);
        for (std::size_t i = 0; i < basis.size(); ++i) EXPECT_EQ(basis.position(basis[i]), i);
    }
}

TEST(Basis, Nested) {
    // P_m is a leading block of P_{m+1} only up to reordering; the positions must agree on content
    for (int m = 0; m < 6; ++m) {
        const MonomialBasis small(m), large(m + 1);
        for (const auto& e : small.indices()) EXPECT_TRUE(large.contains(e));
    }
}

TEST(Generator, SigmaRow) {
    const auto p = reference();
    const GeneratorMatrix g(p, 1);
    EXPECT_EQ(entry(g, {0, 0, 1}, {0, 0, 0}), p.R0 * p.R2);
    EXPECT_EQ(entry(g, {0, 0, 1}, {0, 0, 1}), p.R1 * p.R2 - p.R0);
    EXPECT_EQ(nonzeros_in_row(g, {0, 0, 1}), 2);
}

TEST(Generator, LogPriceRow) {
    const auto p = reference();
    const GeneratorMatrix g(p, 1);
    EXPECT_EQ(entry(g, {1, 0, 0}, {0, 0, 2}), p.z() * p.rho - 0.5);
    EXPECT_EQ(nonzeros_in_row(g, {1, 0, 0}), 1);
    EXPECT_EQ(nonzeros_in_row(g, {0, 0, 0}), 0);
}

TEST(Generator, SigmaSquaredRow) {
    const auto p = reference();
    const GeneratorMatrix g(p, 2);
    EXPECT_DOUBLE_EQ(entry(g, {0, 0, 2}, {0, 0, 1}), 2.0 * p.R0 * p.R2);
    EXPECT_DOUBLE_EQ(entry(g, {0, 0, 2}, {0, 0, 2}), 2.0 * p.R1 * p.R2 - 2.0 * p.R0 + p.nu * p.nu);
    EXPECT_EQ(nonzeros_in_row(g, {0, 0, 2}), 2);
}

TEST(Generator, ClosureUpToDegreeEight) {
    for (int m = 0; m <= 8; ++m) EXPECT_NO_THROW(GeneratorMatrix(reference(), m));
}

TEST(Generator, MatchesItoAtRandomPoints) {
    const ModelParams p{1.3, 2.1, 0.25, 0.7, -0.35, 0.3, 0.1};
    const GeneratorMatrix g(p, 4);
    const auto& basis = g.basis();
    for (const auto& pt : {StatePoint{0.1, -0.2, 0.3}, StatePoint{-0.5, 0.4, 1.2}, StatePoint{1.0, 1.0, 0.05}}) {
        const Eigen::VectorXd h = evaluate_basis(basis, pt);
        const Eigen::VectorXd gh = g.entries() * h;
        for (std::size_t i = 0; i < basis.size(); ++i) {
            const double expected = generator_at(p, basis[i], pt.x, pt.y, pt.sigma);
            EXPECT_NEAR(gh(static_cast<Eigen::Index>(i)), expected, 1e-12 * (1.0 + std::abs(expected)));
        }
    }
}

TEST(Moments, IdentityAtZeroHorizon) {
    const StatePoint s{0.1, 0.0, 0.2};
    const MonomialBasis basis(3);
    const Eigen::VectorXd h = evaluate_basis(basis, s);
    const Eigen::VectorXd m = conditional_moments(reference(), 3, 0.0, s);
    EXPECT_EQ(m, h);
}

TEST(Moments, ConstantStaysOne) {
    for (double tau : {0.01, 0.5, 2.0}) {
        const Eigen::VectorXd m = conditional_moments(reference(), 3, tau, {0.0, 0.0, 0.2});
        EXPECT_NEAR(m(0), 1.0, 1e-13);
    }
}

TEST(Moments, SigmaMeanClosedForm) {
    // E[sigma_t] under Qz solves an affine ODE
    const auto p = reference();
    const double k = p.R1 * p.R2 - p.R0;
    const double t = 0.7;
    const double expected = p.sigma0 * std::exp(k * t) + p.R0 * p.R2 / k * (std::exp(k * t) - 1.0);
    const GeneratorMatrix g(p, 2);
    const Eigen::VectorXd m = conditional_moments(g, t, {0.0, 0.0, p.sigma0});
    EXPECT_NEAR(m(static_cast<Eigen::Index>(g.basis().position({0, 0, 1}))), expected, 1e-13);
}

TEST(Moments, NestingAcrossDegrees) {
    const StatePoint s{0.05, 0.01, 0.25};
    for (int m = 0; m < 7; ++m) {
        const GeneratorMatrix small(reference(), m), large(reference(), m + 1);
        const Eigen::VectorXd ms = conditional_moments(small, 1.0 / 12.0, s);
        const Eigen::VectorXd ml = conditional_moments(large, 1.0 / 12.0, s);
        for (std::size_t i = 0; i < small.basis().size(); ++i) {
            const double a = ms(static_cast<Eigen::Index>(i));
            const double b = ml(static_cast<Eigen::Index>(large.basis().position(small.basis()[i])));
            EXPECT_NEAR(a, b, 1e-10 * std::max(std::abs(b), 1e-300)) << m << ' ' << i;
        }
    }
}

TEST(Moments, Semigroup) {
    const GeneratorMatrix g(reference(), 4);
    const Eigen::MatrixXd a = g.propagator(0.03), b = g.propagator(0.05), ab = g.propagator(0.08);
    const double err = (a * b - ab).lpNorm<1>() / ab.lpNorm<1>();
    EXPECT_LT(err, 1e-9);
}

TEST(Moments, MatchesMonteCarloDegreeTwo) {
    mc::SimulationConfig cfg;
    cfg.n_paths = 1000000;
    cfg.n_steps = 200;
    cfg.measure = mc::Measure::Qz;
    const auto cmp = mc::qz_moment_check(reference(), 2, 1.0 / 12.0, cfg);
    EXPECT_LT(cmp.max_standardized_deviation, 3.0);
}

TEST(Moments, GeneratorSlopeFromShortHorizons) {
    // (E[H(X_h)] - H(x)) / h -> G H(x): the error must shrink with h
    const auto p = reference();
    const GeneratorMatrix g(p, 2);
    const StatePoint s{0.0, 0.0, 0.2};
    const Eigen::VectorXd h0 = evaluate_basis(g.basis(), s);
    const Eigen::VectorXd slope = g.entries() * h0;
    double prev = std::numeric_limits<double>::infinity();
    for (double h : {1e-2, 1e-3}) {
        const Eigen::VectorXd mh = conditional_moments(g, h, s);
        const double err = ((mh - h0) / h - slope).cwiseAbs().maxCoeff();
        EXPECT_LT(err, prev);
        prev = err;
    }
    EXPECT_LT(prev, 1e-2 * (1.0 + slope.cwiseAbs().maxCoeff()));
}

TEST(Moments, OverflowIsReported) {
    const ModelParams p{0.0, 0.0, 0.2, 30.0, 0.0, 0.2, 0.0};
    const GeneratorMatrix g(p, 8);
    EXPECT_THROW(g.propagator(50.0), NumericalOverflow);
}
