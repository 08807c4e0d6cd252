#include "qvol/black_scholes.hpp"

#include <algorithm>
#include <cmath>

#include "qvol/errors.hpp"
#include "qvol/special.hpp"

namespace qvol {

double bs_call(double spot, double strike, double vol, double T) {
    if (vol <= 0.0 || T <= 0.0) return std::max(spot - strike, 0.0);
    const double sd = vol * std::sqrt(T);
    const double d1 = (std::log(spot / strike) + 0.5 * sd * sd) / sd;
    return spot * normal_cdf(d1) - strike * normal_cdf(d1 - sd);
}

double implied_vol(double price, double spot, double strike, double T) {
    if (!(spot > 0.0) || !(strike > 0.0) || !(T > 0.0))
        throw InvalidArgument("implied_vol requires spot, strike, T > 0");
    const double intrinsic = std::max(spot - strike, 0.0);
    if (!(price > intrinsic) || !(price < spot))
        throw OutOfBounds("call price outside the no-arbitrage band (intrinsic, spot)");

    double lo = 1e-6;
    double hi = 5.0;
    if (price > bs_call(spot, strike, hi, T) || price < bs_call(spot, strike, lo, T))
        throw OutOfBounds("implied volatility outside [1e-6, 5]");
    for (int i = 0; i < 200 && hi - lo > 1e-10; ++i) {
        const double mid = 0.5 * (lo + hi);
        (bs_call(spot, strike, mid, T) < price ? lo : hi) = mid;
    }
    double vol = 0.5 * (lo + hi);
    for (int i = 0; i < 8; ++i) {
        const double sd = vol * std::sqrt(T);
        const double d1 = (std::log(spot / strike) + 0.5 * sd * sd) / sd;
        const double vega = spot * normal_pdf(d1) * std::sqrt(T);
        if (!(vega > 0.0)) break;
        const double step = (bs_call(spot, strike, vol, T) - price) / vega;
        const double candidate = vol - step;
        if (!(candidate > lo * 0.5 && candidate < hi * 2.0)) break;
        vol = candidate;
        if (std::fabs(step) < 1e-15 * vol) break;
    }
    return vol;
}

}  // namespace qvol
