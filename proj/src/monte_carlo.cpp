#include "qvol/monte_carlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <thread>

#include "qvol/errors.hpp"
#include "qvol/polynomial_engine.hpp"

namespace qvol::mc {

std::string_view to_string(Measure measure) { return measure == Measure::Q ? "Q" : "Qz"; }

std::string_view to_string(Scheme scheme) { return scheme == Scheme::IJK ? "IJK" : "LogEuler"; }

Measure parse_measure(std::string_view text) {
    if (text == "Q") return Measure::Q;
    if (text == "Qz") return Measure::Qz;
    throw InvalidArgument("unknown measure '" + std::string(text) + "' (expected Q or Qz)");
}

Scheme parse_scheme(std::string_view text) {
    if (text == "IJK") return Scheme::IJK;
    if (text == "LogEuler") return Scheme::LogEuler;
    throw InvalidArgument("unknown scheme '" + std::string(text) + "' (expected IJK or LogEuler)");
}

namespace {

// Sum of term(i), i in [lo, hi), by pairwise splitting; deterministic for fixed n.
template <class Term>
double pairwise_sum(std::size_t lo, std::size_t hi, const Term& term) {
    if (hi - lo <= 256) {
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += term(i);
        return s;
    }
    const std::size_t mid = lo + (hi - lo) / 2;
    return pairwise_sum(lo, mid, term) + pairwise_sum(mid, hi, term);
}

template <class Term>
double pairwise_mean(std::size_t n, const Term& term) {
    return pairwise_sum(0, n, term) / static_cast<double>(n);
}

std::mt19937_64 batch_engine(std::uint64_t seed, std::uint64_t batch) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(batch), static_cast<std::uint32_t>(batch >> 32)};
    return std::mt19937_64(seq);
}

struct PathKernel {
    const ModelParams& p;
    double T;
    const SimulationConfig& config;

    // drift of sigma under the simulation measure
    double drift(double s) const {
        if (config.measure == Measure::Q) return (p.R0 + p.R1 * s) * (p.R2 - s);
        return p.R0 * p.R2 + s * (p.R1 * p.R2 - p.R0);
    }

    void run_batch(std::size_t begin, std::size_t end, std::uint64_t batch, TerminalSample& out,
                   std::size_t& floors) const {
        auto engine = batch_engine(config.seed, batch);
        std::normal_distribution<double> normal(0.0, 1.0);
        const int steps = config.n_steps;
        const double dt = T / steps;
        const double sqrt_dt = std::sqrt(dt);
        const double nu = p.nu;
        const double nu2 = nu * nu;
        const double z = p.z();
        const double rho = p.rho;
        const double rho_bar = std::sqrt(std::max(0.0, 1.0 - rho * rho));

        for (std::size_t path = begin; path < end; ++path) {
            double s = p.sigma0;
            double mu = drift(s);
            double int_var = 0.0;    // int sigma^2 dt
            double int_drift = 0.0;  // int drift(sigma) dt
            double int_noise = 0.0;  // int sigma dW, IJK only
            for (int k = 0; k < steps; ++k) {
                const double dw = sqrt_dt * normal(engine);
                double next;
                if (config.scheme == Scheme::LogEuler) {
                    next = s * std::exp((mu / s - 0.5 * nu2) * dt + nu * dw);
                } else {
                    next = s + mu * dt + nu * s * dw + 0.5 * nu2 * s * (dw * dw - dt);
                    int_noise += s * dw;
                    if (next < 0.0) {
                        next = 0.0;
                        ++floors;
                    }
                }
                const double mu_next = drift(next);
                int_var += 0.5 * (s * s + next * next) * dt;
                int_drift += 0.5 * (mu + mu_next) * dt;
                s = next;
                mu = mu_next;
            }
            const double stoch = config.scheme == Scheme::LogEuler ? (s - p.sigma0 - int_drift) / nu
                                                                   : int_noise;
            const double x_drift = config.measure == Measure::Q ? -0.5 : z * rho - 0.5;
            const double b = normal(engine);
            out.x[path] = p.x0 + x_drift * int_var + rho * stoch + rho_bar * std::sqrt(int_var) * b;
            out.sigma[path] = s;
            if (config.measure == Measure::Qz) out.y[path] = 0.5 * z * z * int_var + z * stoch;
        }
    }
};

}  // namespace

TerminalSample simulate_terminal(const ModelParams& params, double T,
                                 const SimulationConfig& config) {
    require_valid(params);
    if (!(T > 0.0)) throw InvalidArgument("maturity must be > 0");
    if (config.n_paths < 1 || config.n_steps < 1)
        throw InvalidArgument("simulation needs at least one path and one step");

    TerminalSample sample;
    sample.measure = config.measure;
    sample.x.resize(config.n_paths);
    sample.sigma.resize(config.n_paths);
    if (config.measure == Measure::Qz) sample.y.resize(config.n_paths);

    const PathKernel kernel{params, T, config};
    const std::size_t batches = (config.n_paths + kBatchSize - 1) / kBatchSize;
    const int workers = std::max(1, std::min<int>(config.threads, static_cast<int>(batches)));
    std::vector<std::size_t> floors(batches, 0);
    std::atomic<std::size_t> next_batch{0};

    auto work = [&] {
        for (std::size_t b = next_batch++; b < batches; b = next_batch++) {
            const std::size_t begin = b * kBatchSize;
            const std::size_t end = std::min(config.n_paths, begin + kBatchSize);
            kernel.run_batch(begin, end, b, sample, floors[b]);
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < workers; ++i) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    for (auto f : floors) sample.floor_events += f;
    return sample;
}

namespace {

struct Feature {
    int alpha;
    int beta;
};

}  // namespace

McEstimate estimate_price(const ModelParams& params, const TerminalSample& sample,
                          const Payoff& payoff, double T) {
    const std::size_t n = sample.size();
    if (n == 0) throw InvalidArgument("empty Monte-Carlo sample");
    const bool qz = sample.measure == Measure::Qz;

    std::vector<double> discounted(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double f = payoff(std::exp(sample.x[i]));
        discounted[i] = qz ? std::exp(-sample.y[i]) * f : f;
    }

    McEstimate est;
    est.n_paths = n;
    const double mean_y = pairwise_mean(n, [&](std::size_t i) { return discounted[i]; });
    const double plain_var =
        n > 1 ? pairwise_sum(0, n,
                             [&](std::size_t i) {
                                 const double d = discounted[i] - mean_y;
                                 return d * d;
                             }) /
                    static_cast<double>(n - 1)
              : 0.0;
    est.plain_value = mean_y;
    est.plain_std_error = std::sqrt(plain_var / static_cast<double>(n));
    est.value = est.plain_value;
    est.std_error = est.plain_std_error;

    // y vanishes identically when R1 = 0, so only x-features are used then
    std::vector<Feature> features;
    if (qz && params.R1 != 0.0) {
        features = {{1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}};
    } else if (params.R1 == 0.0) {
        features = {{1, 0}, {2, 0}};
    }
    const std::size_t p = features.size();
    if (p > 0 && n > p + 1 && plain_var > 0.0) {
        const auto moments = conditional_moments(params, 2, T, {params.x0, 0.0, params.sigma0});
        const MonomialBasis basis(2);
        auto feature = [&](std::size_t j, std::size_t i) {
            const double y = qz ? sample.y[i] : 0.0;
            return std::pow(sample.x[i], features[j].alpha) * std::pow(y, features[j].beta);
        };
        Eigen::VectorXd means(p), exact(p);
        for (std::size_t j = 0; j < p; ++j) {
            means(j) = pairwise_mean(n, [&](std::size_t i) { return feature(j, i); });
            exact(j) = moments(basis.position({features[j].alpha, features[j].beta, 0}));
        }
        Eigen::MatrixXd cov(p, p);
        Eigen::VectorXd cross(p);
        for (std::size_t j = 0; j < p; ++j) {
            for (std::size_t k = 0; k <= j; ++k) {
                cov(j, k) = cov(k, j) = pairwise_sum(0, n, [&](std::size_t i) {
                    return (feature(j, i) - means(j)) * (feature(k, i) - means(k));
                });
            }
            cross(j) = pairwise_sum(0, n, [&](std::size_t i) {
                return (feature(j, i) - means(j)) * (discounted[i] - mean_y);
            });
        }
        const Eigen::VectorXd beta = cov.completeOrthogonalDecomposition().solve(cross);
        if (beta.allFinite()) {
            const double residual_ss = pairwise_sum(0, n, [&](std::size_t i) {
                double fit = 0.0;
                for (std::size_t j = 0; j < p; ++j) fit += beta(j) * (feature(j, i) - means(j));
                const double r = discounted[i] - mean_y - fit;
                return r * r;
            });
            est.value = mean_y - beta.dot(means - exact);
            est.std_error = std::sqrt(residual_ss / static_cast<double>(n - p - 1) /
                                      static_cast<double>(n));
            est.control_variate = true;
        }
    }
    est.ci99_half_width = kZ99 * est.std_error;
    return est;
}

McEstimate mc_price(const ModelParams& params, const Payoff& payoff, double T,
                    const SimulationConfig& config) {
    const auto sample = simulate_terminal(params, T, config);
    auto est = estimate_price(params, sample, payoff, T);
    est.threads = config.threads;
    return est;
}

MomentComparison compare_moments(const ModelParams& params, int m, double T,
                                 const TerminalSample& sample) {
    if (sample.measure != Measure::Qz) throw InvalidArgument("moment check needs a Qz sample");
    const MonomialBasis basis(m);
    const StatePoint start{params.x0, 0.0, params.sigma0};
    MomentComparison out;
    out.analytical = conditional_moments(params, m, T, start);
    const auto d = static_cast<Eigen::Index>(basis.size());
    out.empirical.resize(d);
    out.std_error.resize(d);
    const std::size_t n = sample.size();
    for (Eigen::Index j = 0; j < d; ++j) {
        const auto idx = basis[static_cast<std::size_t>(j)];
        auto h = [&](std::size_t i) {
            return std::pow(sample.x[i], idx.alpha) * std::pow(sample.y[i], idx.beta) *
                   std::pow(sample.sigma[i], idx.gamma);
        };
        const double mean = pairwise_mean(n, h);
        const double var = n > 1 ? pairwise_sum(0, n,
                                                [&](std::size_t i) {
                                                    const double e = h(i) - mean;
                                                    return e * e;
                                                }) /
                                       static_cast<double>(n - 1)
                                 : 0.0;
        out.empirical(j) = mean;
        out.std_error(j) = std::sqrt(var / static_cast<double>(n));
        const double gap = std::fabs(mean - out.analytical(j));
        double dev;
        if (out.std_error(j) > 0.0) {
            dev = gap / out.std_error(j);
        } else {
            dev = gap <= 1e-12 * std::max(1.0, std::fabs(mean)) ? 0.0 : HUGE_VAL;
        }
        out.max_standardized_deviation = std::max(out.max_standardized_deviation, dev);
    }
    return out;
}

MomentComparison qz_moment_check(const ModelParams& params, int m, double T,
                                 const SimulationConfig& config) {
    if (config.measure != Measure::Qz) throw InvalidArgument("moment check needs measure Qz");
    if (T == 0.0) {
        MomentComparison out;
        const MonomialBasis basis(m);
        out.analytical = evaluate_basis(basis, {params.x0, 0.0, params.sigma0});
        out.empirical = out.analytical;
        out.std_error = Eigen::VectorXd::Zero(out.analytical.size());
        return out;
    }
    return compare_moments(params, m, T, simulate_terminal(params, T, config));
}

}  // namespace qvol::mc
