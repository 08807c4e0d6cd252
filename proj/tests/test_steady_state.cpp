#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "qvol/errors.hpp"
#include "qvol/monte_carlo.hpp"
#include "qvol/special.hpp"
#include "qvol/steady_state.hpp"

using namespace qvol;
namespace ss = qvol::steady_state;

namespace {

ModelParams reference() { return {5.0, 5.0, 0.2, 1.0, -0.5, 0.2, 0.0}; }
ModelParams gamma_case() { return {0.0, 5.0, 0.2, 1.0, -0.5, 0.2, 0.0}; }

ModelParams random_params(ss::Tag tag, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    ModelParams p{0.0, 0.0, 0.05 + 0.5 * u(rng), 0.3 + u(rng), -0.5, 0.2, 0.0};
    switch (tag) {
        case ss::Tag::InverseGamma: p.R0 = 0.5 + 5.0 * u(rng); break;
        case ss::Tag::Gamma:
            // 2 R1 R2 > nu^2
            p.R1 = p.nu * p.nu / (2.0 * p.R2) * (1.2 + 3.0 * u(rng));
            break;
        case ss::Tag::GIG:
            p.R0 = 0.2 + 6.0 * u(rng);
            p.R1 = 0.2 + 6.0 * u(rng);
            break;
        case ss::Tag::DegenerateZero: break;
    }
    return p;
}

double normalization(const ModelParams& p) {
    const ss::Law law(p);
    return integrate_half_line([&](double x) { return law(x); }, 1e-12);
}

double quadrature_mean(const ModelParams& p) {
    const ss::Law law(p);
    return integrate_half_line([&](double x) { return x * law(x); }, 1e-12);
}

}  // namespace

TEST(Bessel, MatchesStandardLibrary) {
    for (double nu : {0.0, 0.3, 1.0, 2.5, 7.0, 9.0, 15.5}) {
        for (double x : {0.05, 0.5, 1.0, 4.0, 20.0, 80.0}) {
            const double expected = std::cyl_bessel_k(nu, x);
            if (!std::isfinite(expected) || expected == 0.0) continue;
            EXPECT_NEAR(bessel_k(nu, x) / expected, 1.0, 1e-12) << nu << ' ' << x;
            EXPECT_NEAR(log_bessel_k(nu, x), std::log(expected), 1e-11 * std::max(1.0, std::abs(std::log(expected))));
        }
    }
}

TEST(Bessel, EvenInOrder) {
    for (double nu : {0.4, 3.0, 9.0}) EXPECT_DOUBLE_EQ(bessel_k(-nu, 2.0), bessel_k(nu, 2.0));
}

TEST(Bessel, HalfOrderClosedForm) {
    // K_{1/2}(x) = sqrt(pi / (2x)) e^{-x}
    for (double x : {0.1, 1.0, 10.0, 300.0}) {
        EXPECT_NEAR(log_bessel_k(0.5, x), 0.5 * std::log(M_PI / (2.0 * x)) - x, 1e-12 * (1.0 + x));
    }
}

TEST(Classify, Examples) {
    auto c = ss::classify(reference());
    EXPECT_EQ(c.tag, ss::Tag::GIG);
    EXPECT_DOUBLE_EQ(c.xi, -9.0);

    c = ss::classify(gamma_case());
    EXPECT_EQ(c.tag, ss::Tag::Gamma);
    EXPECT_DOUBLE_EQ(c.xi, 1.0);

    ModelParams p{0.0, 0.0, 0.2, 1.0, -0.5, 0.2, 0.0};
    EXPECT_EQ(ss::classify(p).tag, ss::Tag::DegenerateZero);
    p.R1 = 2.5;  // 2 R1 R2 = nu^2
    EXPECT_EQ(ss::classify(p).tag, ss::Tag::DegenerateZero);
    p.R0 = 1.0;
    p.R1 = 0.0;
    EXPECT_EQ(ss::classify(p).tag, ss::Tag::InverseGamma);
}

TEST(Density, GammaCase) {
    EXPECT_NEAR(ss::density(gamma_case(), 0.1), 10.0 * std::exp(-1.0), 1e-13);
    EXPECT_NEAR(ss::density(gamma_case(), 0.1), 3.6788, 1e-4);
}

TEST(Density, DegenerateThrows) {
    ModelParams p{0.0, 0.0, 0.2, 1.0, -0.5, 0.2, 0.0};
    EXPECT_THROW(ss::density(p, 0.1), DegenerateSteadyState);
    EXPECT_THROW(ss::mean(p), DegenerateSteadyState);
}

TEST(Density, InverseGammaVanishesAtZero) {
    ModelParams p{2.0, 0.0, 0.2, 1.0, -0.5, 0.2, 0.0};
    EXPECT_EQ(ss::density(p, 1e-4), 0.0);
    EXPECT_LT(ss::density(p, 1e-2), 1e-10);
    EXPECT_GT(ss::density(p, 0.2), 0.1);
}

TEST(Density, InverseGammaClosedForm) {
    // shape a = -xi, scale b = 2 R0 R2 / nu^2
    ModelParams p{2.0, 0.0, 0.3, 0.8, -0.5, 0.2, 0.0};
    const double a = 2.0 * p.R0 / (p.nu * p.nu) + 1.0;
    const double b = 2.0 * p.R0 * p.R2 / (p.nu * p.nu);
    for (double x : {0.05, 0.2, 1.0}) {
        const double expected = std::exp(a * std::log(b) - std::lgamma(a) - (a + 1.0) * std::log(x) - b / x);
        EXPECT_NEAR(ss::density(p, x) / expected, 1.0, 1e-12);
    }
}

TEST(Density, LawMatchesFreeFunction) {
    const ss::Law law(reference());
    for (double x : {0.05, 0.2, 0.7}) EXPECT_DOUBLE_EQ(law(x), ss::density(reference(), x));
}

TEST(Density, NonPositiveAbscissa) {
    EXPECT_EQ(ss::density(reference(), 0.0), 0.0);
    EXPECT_EQ(ss::density(reference(), -1.0), 0.0);
}

TEST(Mean, Examples) {
    ModelParams p{3.0, 0.0, 0.25, 1.0, -0.5, 0.2, 0.0};
    EXPECT_EQ(ss::mean(p), 0.25);
    EXPECT_NEAR(ss::mean(gamma_case()), 0.1, 1e-15);
    EXPECT_NEAR(ss::mean(reference()) / quadrature_mean(reference()), 1.0, 1e-6);
}

TEST(Mean, JensenBound) {
    EXPECT_NEAR(ss::mean_lower_bound(gamma_case()), 0.1, 1e-15);
    const double bound = ss::mean_lower_bound(reference());
    EXPECT_GT(bound, 0.0);
    EXPECT_LT(bound, ss::mean(reference()));
    ModelParams p{2.0, 0.0, 0.2, 1.0, -0.5, 0.2, 0.0};
    EXPECT_THROW(ss::mean_lower_bound(p), InvalidArgument);
}

class RandomizedClass : public testing::TestWithParam<ss::Tag> {};

TEST_P(RandomizedClass, NormalizationAndMean) {
    std::mt19937_64 rng(100 + static_cast<int>(GetParam()));
    for (int i = 0; i < 20; ++i) {
        const auto p = random_params(GetParam(), rng);
        ASSERT_EQ(ss::classify(p).tag, GetParam());
        EXPECT_NEAR(normalization(p), 1.0, 1e-6);
        const double mean = ss::mean(p);
        EXPECT_NEAR(quadrature_mean(p) / mean, 1.0, 1e-6);
        if (p.R1 > 0.0) {
            const double bound = ss::mean_lower_bound(p);
            EXPECT_GT(bound, 0.0);
            if (p.R0 == 0.0) {
                EXPECT_NEAR(bound, mean, 1e-12 * mean);
            } else {
                EXPECT_LT(bound, mean);
            }
        }
    }
}

INSTANTIATE_TEST_SUITE_P(Classes, RandomizedClass,
                         testing::Values(ss::Tag::InverseGamma, ss::Tag::Gamma, ss::Tag::GIG));

TEST(Tail, RightTailShape) {
    // density(x) x^(1-xi) exp(2 R1 x / nu^2 + 2 R0 R2 / (nu^2 x)) is the normalizing constant
    for (const auto& p : {reference(), gamma_case()}) {
        const double xi = ss::classify(p).xi;
        const double nu2 = p.nu * p.nu;
        auto g = [&](double x) {
            return ss::density(p, x) * std::pow(x, 1.0 - xi) *
                   std::exp(2.0 * p.R1 * x / nu2 + 2.0 * p.R0 * p.R2 / (nu2 * x));
        };
        EXPECT_NEAR(g(0.8) / g(1.6), 1.0, 1e-8);
        EXPECT_NEAR(g(0.3) / g(2.5), 1.0, 1e-8);
    }
}

TEST(LongRun, MonteCarloMean) {
    // strong reversion, long horizon; the Qz law of sigma is affine and starts far from
    // equilibrium, so simulate under Q where the quadratic drift acts
    ModelParams p{3.0, 2.0, 0.3, 0.5, 0.0, 0.6, 0.0};
    mc::SimulationConfig cfg;
    cfg.n_paths = 40000;
    cfg.n_steps = 2000;
    cfg.measure = mc::Measure::Q;
    cfg.scheme = mc::Scheme::LogEuler;
    const auto sample = mc::simulate_terminal(p, 20.0, cfg);
    double sum = 0.0, sum2 = 0.0;
    for (double s : sample.sigma) {
        sum += s;
        sum2 += s * s;
    }
    const double n = static_cast<double>(sample.size());
    const double mean = sum / n;
    const double se = std::sqrt((sum2 / n - mean * mean) / n);
    EXPECT_LT(std::abs(mean - ss::mean(p)), 3.0 * se) << mean << " vs " << ss::mean(p);
}
