#pragma once

#include <stdexcept>
#include <string>

namespace adseek {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid argument or parameter set (violated invariant on input).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Density too high for vehicles to fit (1/rho <= vehicle length).
class InvalidDensity : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

/// Numerical failure of a solver (no bracketed root, no crossing, ...).
class NumericalError : public Error {
public:
    using Error::Error;
};

class NoSignChange : public NumericalError {
public:
    NoSignChange(const std::string& what, double lo, double hi, double f_lo, double f_hi)
        : NumericalError(what), lo_(lo), hi_(hi), f_lo_(f_lo), f_hi_(f_hi) {}
    double lo() const { return lo_; }
    double hi() const { return hi_; }
    double f_lo() const { return f_lo_; }
    double f_hi() const { return f_hi_; }

private:
    double lo_, hi_, f_lo_, f_hi_;
};

class NoCrossing : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class DegenerateFilter : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class NotFound : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace adseek
