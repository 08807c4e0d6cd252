#include "qvol/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qvol/auxiliary_density.hpp"
#include "qvol/errors.hpp"
#include "qvol/model.hpp"
#include "qvol/monte_carlo.hpp"
#include "qvol/polynomial_engine.hpp"
#include "qvol/pricer.hpp"
#include "qvol/quadrature.hpp"
#include "qvol/steady_state.hpp"

namespace qvol::cli {

namespace {

struct Common {
    std::string params_file;
    std::string output = "json";
    std::string output_path;
    int threads = 1;
};

struct PriceOptions {
    std::string payoff = "call";
    double strike = 1.0;
    double T = 0.0;
    double T_months = 0.0;
    int n = 10;
    int d = 1;
    int K = 15;
    double prune_threshold = 0.0;
    bool prune_corners = false;
    std::string dump_generator;
    std::string dump_mixture;
};

struct ConvergeOptions {
    std::vector<double> T;
    std::vector<double> T_months;
    std::vector<double> log_strikes;
    int n_max = 10;
    int d = 1;
    int K = 15;
    double prune_threshold = 0.0;
    bool prune_corners = false;
    std::size_t mc_paths = 1000000;
    int mc_steps = 200;
    std::uint64_t seed = 42;
    std::string scheme = "LogEuler";
    bool no_mc = false;
};

struct McOptions {
    std::string payoff = "call";
    double strike = 1.0;
    double T = 0.0;
    double T_months = 0.0;
    std::size_t paths = 100000;
    int steps = 200;
    std::uint64_t seed = 42;
    std::string measure = "Qz";
    std::string scheme = "LogEuler";
};

struct SteadyStateOptions {
    std::vector<double> grid;
    std::string grid_range;  // lo:hi:count
};

struct DiagnoseOptions {
    double T = 1.0;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--params", c.params_file, "model parameter JSON file")->required();
    cmd->add_option("--output", c.output, "output format")->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--output-path", c.output_path, "write output to this file instead of stdout");
    cmd->add_option("--threads", c.threads, "worker threads")->check(CLI::PositiveNumber);
}

double maturity(double T, double T_months) {
    if (T_months > 0.0) return T_months / 12.0;
    if (T > 0.0) return T;
    throw CLI::ValidationError("--T", "a positive maturity (--T or --T-months) is required");
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

nlohmann::json num(double v) {
    if (std::isfinite(v)) return v;
    return nullptr;
}

void emit(const Common& c, const std::string& text, std::ostream& out) {
    if (c.output_path.empty()) {
        out << text;
        if (!text.empty() && text.back() != '\n') out << '\n';
        return;
    }
    std::ofstream file(c.output_path);
    if (!file) throw Error("cannot write '" + c.output_path + "'");
    file << text;
    if (!text.empty() && text.back() != '\n') file << '\n';
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream file(path);
    if (!file) throw Error("cannot write '" + path + "'");
    file << text;
}

std::string generator_csv(const GeneratorMatrix& g) {
    std::ostringstream os;
    os << "alpha,beta,gamma";
    for (const auto& idx : g.basis().indices()) os << ",h_" << idx.alpha << '_' << idx.beta << '_' << idx.gamma;
    os << '\n';
    const auto& e = g.entries();
    for (Eigen::Index i = 0; i < e.rows(); ++i) {
        const auto& idx = g.basis()[static_cast<std::size_t>(i)];
        os << idx.alpha << ',' << idx.beta << ',' << idx.gamma;
        for (Eigen::Index j = 0; j < e.cols(); ++j) os << ',' << fmt(e(i, j));
        os << '\n';
    }
    return os.str();
}

std::string mixture_csv(const Mixture& m) {
    std::string s = "w,m,v,y\n";
    for (const auto& c : m.components) s += fmt(c.w) + ',' + fmt(c.m) + ',' + fmt(c.v) + ',' + fmt(c.y) + '\n';
    return s;
}

std::string estimate_json(const mc::McEstimate& e, const mc::SimulationConfig& cfg) {
    nlohmann::json j;
    j["value"] = e.value;
    j["std_error"] = e.std_error;
    j["ci99_half_width"] = e.ci99_half_width;
    j["n_paths"] = e.n_paths;
    j["plain_value"] = e.plain_value;
    j["plain_std_error"] = e.plain_std_error;
    j["control_variate"] = e.control_variate;
    j["metadata"] = {{"threads", cfg.threads},
                     {"seed", cfg.seed},
                     {"n_steps", cfg.n_steps},
                     {"measure", std::string(mc::to_string(cfg.measure))},
                     {"scheme", std::string(mc::to_string(cfg.scheme))}};
    return j.dump(2);
}

int cmd_price(const Common& c, const PriceOptions& o, const ModelParams& p, std::ostream& out) {
    PricingRequest req;
    req.params = p;
    if (o.payoff == "call") {
        req.payoff = CallPayoff{o.strike};
    } else {
        req.payoff = PutPayoff{o.strike};
    }
    req.T = maturity(o.T, o.T_months);
    req.n = o.n;
    req.d = o.d;
    req.K = o.K;
    req.prune_threshold = o.prune_corners ? kCornerPruneThreshold : o.prune_threshold;
    if (!o.dump_generator.empty()) write_file(o.dump_generator, generator_csv(build_generator(p, o.n)));
    if (!o.dump_mixture.empty())
        write_file(o.dump_mixture, mixture_csv(build_mixture(p, req.T, req.d, req.K, req.prune_threshold)));

    const PriceResult result = price(req);
    if (c.output == "csv") {
        std::string s = "n,price,implied_vol\n";
        for (std::size_t j = 0; j < result.pi_by_degree.size(); ++j) {
            const double iv = result.implied_vol_by_degree ? (*result.implied_vol_by_degree)[j] : NAN;
            s += std::to_string(j) + ',' + fmt(result.pi_by_degree[j]) + ',' + fmt(iv) + '\n';
        }
        emit(c, s, out);
    } else {
        emit(c, to_json(result), out);
    }
    return kExitOk;
}

int cmd_converge(const Common& c, const ConvergeOptions& o, const ModelParams& p, std::ostream& out,
                 std::ostream& err) {
    ConvergenceRequest req;
    req.params = p;
    req.maturities = o.T;
    for (double months : o.T_months) req.maturities.push_back(months / 12.0);
    if (req.maturities.empty()) throw CLI::ValidationError("--T", "at least one maturity is required");
    req.log_strikes = o.log_strikes.empty() ? std::vector<double>{0.0} : o.log_strikes;
    req.n_max = o.n_max;
    req.d = o.d;
    req.K = o.K;
    req.prune_threshold = o.prune_corners ? kCornerPruneThreshold : o.prune_threshold;
    req.with_mc = !o.no_mc;
    req.mc.n_paths = o.mc_paths;
    req.mc.n_steps = o.mc_steps;
    req.mc.seed = o.seed;
    req.mc.measure = mc::Measure::Qz;
    req.mc.scheme = mc::parse_scheme(o.scheme);
    req.mc.threads = c.threads;
    if (!is_martingale(p)) err << "warning: parameters violate the martingale condition R1 >= rho*nu\n";

    const auto rows = convergence_table(req);
    if (c.output == "json") {
        nlohmann::json j;
        j["metadata"] = {{"threads", c.threads}, {"seed", o.seed}, {"mc_paths", o.mc_paths},
                         {"mc_steps", o.mc_steps}, {"d", o.d}, {"K", o.K}};
        j["rows"] = nlohmann::json::array();
        for (const auto& r : rows) {
            j["rows"].push_back({{"T", r.T}, {"strike", r.strike}, {"n", r.n}, {"price", num(r.price)},
                                 {"implied_vol", num(r.implied_vol)}, {"mc_price", num(r.mc_price)},
                                 {"mc_ci_half_width", num(r.mc_ci_half_width)},
                                 {"inside_ci", r.inside_ci}});
        }
        emit(c, j.dump(2), out);
    } else {
        emit(c, to_csv(rows), out);
    }
    return kExitOk;
}

int cmd_mc(const Common& c, const McOptions& o, const ModelParams& p, std::ostream& out) {
    mc::SimulationConfig cfg;
    cfg.n_paths = o.paths;
    cfg.n_steps = o.steps;
    cfg.seed = o.seed;
    cfg.measure = mc::parse_measure(o.measure);
    cfg.scheme = mc::parse_scheme(o.scheme);
    cfg.threads = c.threads;
    const double strike = o.strike;
    mc::Payoff payoff;
    if (o.payoff == "call") {
        payoff = [strike](double s) { return std::max(s - strike, 0.0); };
    } else if (o.payoff == "put") {
        payoff = [strike](double s) { return std::max(strike - s, 0.0); };
    } else if (o.payoff == "forward") {
        payoff = [](double s) { return s; };
    } else {
        payoff = [](double) { return 1.0; };
    }
    const auto est = mc::mc_price(p, payoff, maturity(o.T, o.T_months), cfg);
    emit(c, estimate_json(est, cfg), out);
    return kExitOk;
}

int cmd_steady_state(const Common& c, const SteadyStateOptions& o, const ModelParams& p,
                     std::ostream& out) {
    const auto cls = steady_state::classify(p);
    std::vector<double> grid = o.grid;
    if (!o.grid_range.empty()) {
        double lo = 0.0, hi = 0.0;
        int count = 0;
        if (std::sscanf(o.grid_range.c_str(), "%lf:%lf:%d", &lo, &hi, &count) != 3 || count < 2 ||
            !(hi > lo))
            throw CLI::ValidationError("--grid-range", "expected lo:hi:count with hi > lo, count >= 2");
        for (int i = 0; i < count; ++i) grid.push_back(lo + (hi - lo) * i / (count - 1));
    }

    nlohmann::json j;
    j["class"] = std::string(steady_state::to_string(cls.tag));
    j["xi"] = cls.xi;
    if (cls.tag == steady_state::Tag::DegenerateZero) {
        j["mean"] = nullptr;
        j["mean_lower_bound"] = nullptr;
    } else {
        j["mean"] = steady_state::mean(p);
        j["mean_lower_bound"] = p.R1 > 0.0 ? nlohmann::json(steady_state::mean_lower_bound(p)) : nlohmann::json(nullptr);
    }
    std::optional<steady_state::Law> law;
    if (cls.tag != steady_state::Tag::DegenerateZero) law.emplace(p);
    if (c.output == "csv") {
        std::string s = "x,density\n";
        for (double x : grid) s += fmt(x) + ',' + fmt(law ? law->density(x) : NAN) + '\n';
        emit(c, s, out);
        return kExitOk;
    }
    if (!grid.empty() && law) {
        auto rows = nlohmann::json::array();
        for (double x : grid) rows.push_back({x, law->density(x)});
        j["density"] = rows;
    }
    emit(c, j.dump(2), out);
    return kExitOk;
}

int cmd_diagnose(const Common& c, const DiagnoseOptions& o, const ModelParams& p, std::ostream& out) {
    nlohmann::json j;
    j["martingale"] = is_martingale(p);
    if (is_martingale(p)) {
        const auto cm = critical_moments(p);
        j["critical_moments"] = {{"m_minus", cm.m_minus.to_string()}, {"m_plus", cm.m_plus.to_string()}};
        const auto slopes = smile_tail_slopes(p, o.T);
        j["tail_slopes"] = {{"T", o.T}, {"left", slopes.left}, {"right", slopes.right}};
    } else {
        j["critical_moments"] = nullptr;
        j["tail_slopes"] = nullptr;
    }
    const auto cls = steady_state::classify(p);
    nlohmann::json ss;
    ss["class"] = std::string(steady_state::to_string(cls.tag));
    ss["xi"] = cls.xi;
    try {
        ss["mean"] = steady_state::mean(p);
    } catch (const Error&) {
        ss["mean"] = nullptr;
    }
    j["steady_state"] = ss;
    if (c.output == "csv") {
        std::string s = "key,value\n";
        s += "martingale," + std::string(is_martingale(p) ? "true" : "false") + '\n';
        if (is_martingale(p)) {
            s += "m_minus," + j["critical_moments"]["m_minus"].get<std::string>() + '\n';
            s += "m_plus," + j["critical_moments"]["m_plus"].get<std::string>() + '\n';
            s += "left_slope," + fmt(j["tail_slopes"]["left"].get<double>()) + '\n';
            s += "right_slope," + fmt(j["tail_slopes"]["right"].get<double>()) + '\n';
        }
        s += "steady_state_class," + ss["class"].get<std::string>() + '\n';
        s += "xi," + fmt(cls.xi) + '\n';
        s += "steady_state_mean," + (ss["mean"].is_null() ? std::string("nan") : fmt(ss["mean"].get<double>())) + '\n';
        emit(c, s, out);
    } else {
        emit(c, j.dump(2), out);
    }
    return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Quadratic-drift stochastic volatility toolkit"};
    app.require_subcommand(1);
    app.allow_extras(false);

    Common common;
    PriceOptions price_opts;
    ConvergeOptions conv_opts;
    McOptions mc_opts;
    SteadyStateOptions ss_opts;
    DiagnoseOptions diag_opts;

    auto* price_cmd = app.add_subcommand("price", "price a call or put by polynomial expansion");
    add_common(price_cmd, common);
    price_cmd->add_option("--payoff", price_opts.payoff)->check(CLI::IsMember({"call", "put"}));
    price_cmd->add_option("--strike", price_opts.strike)->check(CLI::PositiveNumber);
    price_cmd->add_option("--T", price_opts.T, "maturity in years");
    price_cmd->add_option("--T-months", price_opts.T_months, "maturity in months (exactly months/12)");
    price_cmd->add_option("--n", price_opts.n, "expansion degree")->check(CLI::NonNegativeNumber);
    price_cmd->add_option("--d", price_opts.d, "IJK steps")->check(CLI::PositiveNumber);
    price_cmd->add_option("--K", price_opts.K, "quadrature points per dimension")->check(CLI::PositiveNumber);
    price_cmd->add_option("--prune-threshold", price_opts.prune_threshold)->check(CLI::Range(0.0, 0.999999));
    price_cmd->add_flag("--prune", price_opts.prune_corners, "drop low-weight corner points");
    price_cmd->add_option("--dump-generator", price_opts.dump_generator, "write G_n as CSV");
    price_cmd->add_option("--dump-mixture", price_opts.dump_mixture, "write mixture components as CSV");

    auto* conv_cmd = app.add_subcommand("converge", "convergence table against Monte-Carlo");
    add_common(conv_cmd, common);
    conv_cmd->add_option("--T", conv_opts.T, "maturities in years")->delimiter(',');
    conv_cmd->add_option("--T-months", conv_opts.T_months, "maturities in months")->delimiter(',');
    conv_cmd->add_option("--logK", conv_opts.log_strikes, "log-strikes")->delimiter(',');
    conv_cmd->add_option("--nmax", conv_opts.n_max)->check(CLI::PositiveNumber);
    conv_cmd->add_option("--d", conv_opts.d)->check(CLI::PositiveNumber);
    conv_cmd->add_option("--K", conv_opts.K)->check(CLI::PositiveNumber);
    conv_cmd->add_option("--prune-threshold", conv_opts.prune_threshold)->check(CLI::Range(0.0, 0.999999));
    conv_cmd->add_flag("--prune", conv_opts.prune_corners, "drop low-weight corner points");
    conv_cmd->add_option("--mc-paths", conv_opts.mc_paths)->check(CLI::PositiveNumber);
    conv_cmd->add_option("--mc-steps", conv_opts.mc_steps)->check(CLI::PositiveNumber);
    conv_cmd->add_option("--seed", conv_opts.seed);
    conv_cmd->add_option("--scheme", conv_opts.scheme)->check(CLI::IsMember({"LogEuler", "IJK"}));
    conv_cmd->add_flag("--no-mc", conv_opts.no_mc, "skip the Monte-Carlo benchmark");

    auto* mc_cmd = app.add_subcommand("mc", "Monte-Carlo price with control variate");
    add_common(mc_cmd, common);
    mc_cmd->add_option("--payoff", mc_opts.payoff)->check(CLI::IsMember({"call", "put", "forward", "unit"}));
    mc_cmd->add_option("--strike", mc_opts.strike)->check(CLI::PositiveNumber);
    mc_cmd->add_option("--T", mc_opts.T);
    mc_cmd->add_option("--T-months", mc_opts.T_months);
    mc_cmd->add_option("--paths", mc_opts.paths)->check(CLI::PositiveNumber);
    mc_cmd->add_option("--steps", mc_opts.steps)->check(CLI::PositiveNumber);
    mc_cmd->add_option("--seed", mc_opts.seed);
    mc_cmd->add_option("--measure", mc_opts.measure)->check(CLI::IsMember({"Q", "Qz"}));
    mc_cmd->add_option("--scheme", mc_opts.scheme)->check(CLI::IsMember({"LogEuler", "IJK"}));

    auto* ss_cmd = app.add_subcommand("steady-state", "steady-state law of the volatility");
    add_common(ss_cmd, common);
    ss_cmd->add_option("--grid", ss_opts.grid, "density abscissae")->delimiter(',');
    ss_cmd->add_option("--grid-range", ss_opts.grid_range, "lo:hi:count");

    auto* diag_cmd = app.add_subcommand("diagnose", "martingale, moments, steady state, smile wings");
    add_common(diag_cmd, common);
    diag_cmd->add_option("--T", diag_opts.T, "maturity for the tail slopes")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return kExitOk;
        }
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    ModelParams params;
    try {
        params = load_params(common.params_file);
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    const auto report = validate(params);
    if (!report.valid()) {
        err << "invalid model parameters:\n" << report.failures() << '\n';
        return kExitInvalidParams;
    }

    try {
        if (*price_cmd) return cmd_price(common, price_opts, params, out);
        if (*conv_cmd) return cmd_converge(common, conv_opts, params, out, err);
        if (*mc_cmd) return cmd_mc(common, mc_opts, params, out);
        if (*ss_cmd) return cmd_steady_state(common, ss_opts, params, out);
        if (*diag_cmd) return cmd_diagnose(common, diag_opts, params, out);
    } catch (const CLI::ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitUsage;
}

}  // namespace qvol::cli
