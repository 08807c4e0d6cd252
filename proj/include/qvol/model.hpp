#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qvol {

// Parameters of the quadratic-drift volatility model
//
//    dx(t)     = -1/2 sigma(t)^2 dt + sigma(t) (rho dW(t) + sqrt(1-rho^2) dB(t))
//    dsigma(t) = (R0 + R1 sigma(t)) (R2 - sigma(t)) dt + nu sigma(t) dW(t)
//
// with zero rates and no dividends, S(t) = exp(x(t)).
struct ModelParams {
    double R0 = 0.0;      // mean-reversion coefficient
    double R1 = 0.0;      // quadratic-drift coefficient
    double R2 = 0.0;      // reversion level
    double nu = 0.0;      // vol-of-vol
    double rho = 0.0;     // spot/vol correlation
    double sigma0 = 0.0;  // initial volatility
    double x0 = 0.0;      // initial log-price

    // Girsanov intensity of the measure change that removes the quadratic drift.
    double z() const { return R1 / nu; }

    friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

struct ConstraintCheck {
    std::string constraint;
    bool passed = true;
    std::string reason;
};

struct ValidationReport {
    std::vector<ConstraintCheck> checks;

    bool valid() const;
    // Reasons of all failed checks, one per line.
    std::string failures() const;
};

ValidationReport validate(const ModelParams& params);

// Throws InvalidArgument listing every violated constraint.
void require_valid(const ModelParams& params);

// S is a true martingale iff R1 >= rho*nu. Exact comparison, no tolerance.
bool is_martingale(const ModelParams& params);

enum class MomentStatus { Finite, Infinite, BoundaryFinite, BoundaryUnknown };

std::string_view to_string(MomentStatus status);

// Finiteness of E[S_T^m] for m outside [0, 1]; throws InvalidArgument otherwise.
MomentStatus moment_status(const ModelParams& params, double m);

class ExtendedReal {
public:
    enum class Kind { Finite, PlusInfinity, MinusInfinity };

    static ExtendedReal finite(double value) { return {Kind::Finite, value}; }
    static ExtendedReal plus_infinity() { return {Kind::PlusInfinity, 0.0}; }
    static ExtendedReal minus_infinity() { return {Kind::MinusInfinity, 0.0}; }

    Kind kind() const { return kind_; }
    bool is_finite() const { return kind_ == Kind::Finite; }
    // Throws std::logic_error when infinite.
    double value() const;
    std::string to_string() const;

private:
    ExtendedReal(Kind kind, double value) : kind_(kind), value_(value) {}
    Kind kind_;
    double value_;
};

struct CriticalMoments {
    ExtendedReal m_minus;
    ExtendedReal m_plus;
};

// Supremum / infimum of the finite moments of S_T. Throws NotMartingale when R1 < rho*nu.
CriticalMoments critical_moments(const ModelParams& params);

// beta(x) = 2 - 4 (sqrt(x^2 + x) - x), decreasing from 2 at x = 0 to 0 at infinity.
double lee_beta(double x);

struct TailSlopes {
    double left = 0.0;   // limsup sigma_BS^2 / |k| as k -> -inf
    double right = 0.0;  // limsup sigma_BS^2 / |k| as k -> +inf
};

TailSlopes smile_tail_slopes(const ModelParams& params, double T);

struct PriceBound {
    enum class Side { Upper, Lower };
    Side side;
    double value;
};

// Pathwise bound on S_T for the perfectly (anti-)correlated cases, if one applies.
std::optional<PriceBound> price_bound(const ModelParams& params, double spot, double vol,
                                      double horizon);

// Flat JSON with keys R0,R1,R2,nu,rho,sigma0,x0 in that order, 17 significant digits.
std::string to_json(const ModelParams& params);
ModelParams params_from_json(std::string_view text);
ModelParams load_params(const std::string& path);

}  // namespace qvol
