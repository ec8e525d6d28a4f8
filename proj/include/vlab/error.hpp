#pragma once

#include <stdexcept>
#include <string>

namespace vlab {

// All library failures derive from Error so callers can catch one type.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation (r >= 1/4, odd M, d=1 for zeta ...).
class DomainError : public Error {
public:
    using Error::Error;
};

// Grid too coarse for the requested mollification radius.
class ResolutionError : public Error {
public:
    using Error::Error;
};

// Density does not integrate to one (or its mean deviates from one).
class NormalizationError : public Error {
public:
    using Error::Error;
};

// Time step too large for the advection or the plasma oscillation.
class CflError : public Error {
public:
    using Error::Error;
};

// Phase-space support reached the truncated velocity boundary.
class SupportError : public Error {
public:
    SupportError(const std::string& what, double suggested_vmax)
        : Error(what), suggested_vmax_(suggested_vmax) {}
    double suggested_vmax() const noexcept { return suggested_vmax_; }

private:
    double suggested_vmax_;
};

// Mismatched parameters between two objects that must agree (table vs ensemble ...).
class MismatchError : public Error {
public:
    using Error::Error;
};

// Transport problem exceeds the exact-LP budget.
class SizeError : public Error {
public:
    using Error::Error;
};

// Non-finite state during time stepping.
class NonFiniteError : public Error {
public:
    NonFiniteError(const std::string& what, std::size_t index) : Error(what), index_(index) {}
    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

// Parameter regime violates an admissibility inequality.
class AdmissibilityError : public Error {
public:
    using Error::Error;
};

// Numeric overflow guard (analytic norm weights ...).
class OverflowError : public Error {
public:
    using Error::Error;
};

// Rejection sampler accepts too rarely to be useful.
class SamplingError : public Error {
public:
    using Error::Error;
};

}  // namespace vlab
