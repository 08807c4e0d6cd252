#pragma once

namespace qvol {

// Undiscounted Black-Scholes call (zero rates, no dividends).
double bs_call(double spot, double strike, double vol, double T);

// Implied volatility of a call price; bisection on [1e-6, 5] followed by Newton polish.
// Throws OutOfBounds unless (spot - strike)^+ < price < spot.
double implied_vol(double price, double spot, double strike, double T);

}  // namespace qvol
