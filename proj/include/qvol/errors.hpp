#pragma once

#include <stdexcept>
#include <string>

namespace qvol {

// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

class NotMartingale : public Error {
public:
    NotMartingale() : Error("stock price is not a martingale (R1 < rho*nu)") {}
};

class DegenerateSteadyState : public Error {
public:
    DegenerateSteadyState() : Error("volatility converges to zero; no steady-state density") {}
};

class MomentDoesNotExist : public Error {
public:
    using Error::Error;
};

class SingularGram : public Error {
public:
    using Error::Error;
};

class OutOfBounds : public Error {
public:
    using Error::Error;
};

class NonFiniteIntegrand : public Error {
public:
    using Error::Error;
};

class NumericalOverflow : public Error {
public:
    using Error::Error;
};

}  // namespace qvol
