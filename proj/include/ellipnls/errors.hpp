#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace ellipnls {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidInputError : public Error {
public:
    using Error::Error;
};

/// Raw Weierstrass evaluation requested too close to a lattice point.
class PoleProximityError : public Error {
public:
    PoleProximityError(const std::string& msg, std::complex<double> nearest_point)
        : Error(msg), nearest(nearest_point) {}
    std::complex<double> nearest;
};

class NumericFailureError : public Error {
public:
    NumericFailureError(const std::string& msg, std::string diag = {})
        : Error(msg), diagnostics(std::move(diag)) {}
    std::string diagnostics;
};

class SingularityError : public Error {
public:
    using Error::Error;
};

/// A physicality inequality failed at the requested evaluation point.
class ConstraintViolationError : public Error {
public:
    ConstraintViolationError(const std::string& msg, std::string which)
        : Error(msg), constraint(std::move(which)) {}
    std::string constraint;
};

class ResolutionError : public Error {
public:
    using Error::Error;
};

class InstabilityError : public Error {
public:
    InstabilityError(const std::string& msg, double z) : Error(msg), z_onset(z) {}
    double z_onset;
};

/// Phase unwrapping detected a jump larger than the tracking step allows.
class StepRefinementError : public Error {
public:
    using Error::Error;
};

class InternalError : public Error {
public:
    using Error::Error;
};

}  // namespace ellipnls
