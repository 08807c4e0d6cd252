#include "qvol/model.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "qvol/errors.hpp"

namespace qvol {

bool ValidationReport::valid() const {
    for (const auto& check : checks) {
        if (!check.passed) return false;
    }
    return true;
}

std::string ValidationReport::failures() const {
    std::string out;
    for (const auto& check : checks) {
        if (check.passed) continue;
        if (!out.empty()) out += '\n';
        out += check.reason;
    }
    return out;
}

ValidationReport validate(const ModelParams& p) {
    ValidationReport report;
    auto add = [&](std::string constraint, bool ok, std::string reason) {
        report.checks.push_back({std::move(constraint), ok, ok ? std::string{} : std::move(reason)});
    };
    const bool finite = std::isfinite(p.R0) && std::isfinite(p.R1) && std::isfinite(p.R2) &&
                        std::isfinite(p.nu) && std::isfinite(p.rho) && std::isfinite(p.sigma0) &&
                        std::isfinite(p.x0);
    add("finite", finite, "all parameters must be finite");
    add("R0 >= 0", p.R0 >= 0.0, "R0 must be >= 0");
    // R1 < 0 lets the volatility explode in finite time.
    add("R1 >= 0", p.R1 >= 0.0, "R1 must be >= 0");
    add("R2 > 0", p.R2 > 0.0, "R2 must be > 0");
    add("nu > 0", p.nu > 0.0, "nu must be > 0");
    add("sigma0 > 0", p.sigma0 > 0.0, "sigma0 must be > 0");
    add("-1 <= rho <= 1", p.rho >= -1.0 && p.rho <= 1.0, "rho out of [-1,1]");
    return report;
}

void require_valid(const ModelParams& params) {
    auto report = validate(params);
    if (!report.valid()) throw InvalidArgument("invalid model parameters:\n" + report.failures());
}

bool is_martingale(const ModelParams& p) { return p.R1 >= p.rho * p.nu; }

std::string_view to_string(MomentStatus status) {
    switch (status) {
        case MomentStatus::Finite: return "Finite";
        case MomentStatus::Infinite: return "Infinite";
        case MomentStatus::BoundaryFinite: return "BoundaryFinite";
        case MomentStatus::BoundaryUnknown: return "BoundaryUnknown";
    }
    return "?";
}

MomentStatus moment_status(const ModelParams& p, double m) {
    if (!(m < 0.0 || m > 1.0)) throw InvalidArgument("moment order must lie outside [0, 1]");
    const double threshold = p.nu * (p.rho * m + std::sqrt(m * m - m));
    if (p.R1 > threshold) return MomentStatus::Finite;
    if (p.R1 < threshold) return MomentStatus::Infinite;
    return p.R0 >= p.R1 * p.R2 ? MomentStatus::BoundaryFinite : MomentStatus::BoundaryUnknown;
}

double ExtendedReal::value() const {
    if (kind_ != Kind::Finite) throw std::logic_error("value() of an infinite ExtendedReal");
    return value_;
}

std::string ExtendedReal::to_string() const {
    switch (kind_) {
        case Kind::PlusInfinity: return "+inf";
        case Kind::MinusInfinity: return "-inf";
        case Kind::Finite: break;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", value_);
    return buf;
}

CriticalMoments critical_moments(const ModelParams& p) {
    if (!is_martingale(p)) throw NotMartingale();
    const double z = p.z();
    if (p.rho == 1.0) {
        return {ExtendedReal::minus_infinity(),
                ExtendedReal::finite(p.R1 * p.R1 / (2.0 * p.R1 * p.nu - p.nu * p.nu))};
    }
    if (p.rho == -1.0) {
        return {ExtendedReal::finite(p.R1 * p.R1 / (-2.0 * p.R1 * p.nu - p.nu * p.nu)),
                ExtendedReal::plus_infinity()};
    }
    // Roots of a m^2 + b m + c, evaluated without cancellation.
    const double a = 1.0 - p.rho * p.rho;
    const double b = 2.0 * z * p.rho - 1.0;
    const double c = -z * z;
    const double disc = std::sqrt(b * b - 4.0 * a * c);
    const double q = -0.5 * (b + std::copysign(disc, b));
    double r1 = q / a;
    double r2 = c / q;
    if (r1 > r2) std::swap(r1, r2);
    return {ExtendedReal::finite(r1), ExtendedReal::finite(r2)};
}

double lee_beta(double x) {
    if (x < 0.0) throw InvalidArgument("lee_beta requires x >= 0");
    if (std::isinf(x)) return 0.0;
    // sqrt(x^2 + x) - x = x / (sqrt(x^2 + x) + x)
    const double gap = x == 0.0 ? 0.0 : x / (std::sqrt(x * x + x) + x);
    return 2.0 - 4.0 * gap;
}

TailSlopes smile_tail_slopes(const ModelParams& params, double T) {
    if (!(T > 0.0)) throw InvalidArgument("maturity must be > 0");
    const auto cm = critical_moments(params);
    TailSlopes slopes;
    slopes.left = cm.m_minus.is_finite() ? lee_beta(-cm.m_minus.value()) / T : 0.0;
    slopes.right = cm.m_plus.is_finite() ? lee_beta(cm.m_plus.value() - 1.0) / T : 0.0;
    return slopes;
}

std::optional<PriceBound> price_bound(const ModelParams& p, double spot, double vol,
                                      double horizon) {
    if (!(spot > 0.0) || !(vol > 0.0) || !(horizon > 0.0))
        throw InvalidArgument("price_bound requires spot, vol, horizon > 0");
    const bool dominated = p.R0 >= p.R1 * p.R2;
    const double exponent = vol / p.nu + p.R0 * p.R2 * horizon / p.nu;
    if (p.rho == -1.0 && dominated) return PriceBound{PriceBound::Side::Upper, spot * std::exp(exponent)};
    if (p.rho == 1.0 && dominated && 2.0 * p.R1 >= p.nu)
        return PriceBound{PriceBound::Side::Lower, spot * std::exp(-exponent)};
    return std::nullopt;
}

std::string to_json(const ModelParams& p) {
    const std::pair<const char*, double> fields[] = {{"R0", p.R0},   {"R1", p.R1},
                                                     {"R2", p.R2},   {"nu", p.nu},
                                                     {"rho", p.rho}, {"sigma0", p.sigma0},
                                                     {"x0", p.x0}};
    std::string out = "{\n";
    char buf[64];
    for (std::size_t i = 0; i < std::size(fields); ++i) {
        std::snprintf(buf, sizeof buf, "  \"%s\": %.17g%s\n", fields[i].first, fields[i].second,
                      i + 1 < std::size(fields) ? "," : "");
        out += buf;
    }
    out += "}\n";
    return out;
}

ModelParams params_from_json(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw InvalidArgument(std::string("malformed parameter JSON: ") + e.what());
    }
    if (!j.is_object()) throw InvalidArgument("parameter JSON must be an object");
    auto get = [&](const char* key) {
        if (!j.contains(key) || !j[key].is_number())
            throw InvalidArgument(std::string("parameter JSON missing numeric key '") + key + "'");
        return j[key].get<double>();
    };
    ModelParams p;
    p.R0 = get("R0");
    p.R1 = get("R1");
    p.R2 = get("R2");
    p.nu = get("nu");
    p.rho = get("rho");
    p.sigma0 = get("sigma0");
    p.x0 = get("x0");
    return p;
}

ModelParams load_params(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open parameter file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return params_from_json(ss.str());
}

}  // namespace qvol
