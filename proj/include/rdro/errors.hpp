#pragma once

#include <stdexcept>
#include <string>

namespace rdro {

// Base class for all solver errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Mismatched vector/matrix sizes.
class DimensionError : public Error {
public:
    using Error::Error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

// Overflow, underflow or non-finite values the solver cannot recover from.
class NumericError : public Error {
public:
    using Error::Error;
};

// Instance too large for an exact/enumerative routine.
class CapacityError : public Error {
public:
    using Error::Error;
};

// Invalid or inconsistent configuration (empty decision set, bad schema, ...).
class ConfigError : public Error {
public:
    using Error::Error;
};

// Root-finding bracket does not straddle the target.
class BracketError : public Error {
public:
    using Error::Error;
};

// Infeasible instance (e.g. second-stage supply below demand).
class InfeasibleError : public Error {
public:
    explicit InfeasibleError(const std::string& msg, double deficit = 0.0)
        : Error(msg), deficit_(deficit) {}
    double deficit() const { return deficit_; }

private:
    double deficit_;
};

}  // namespace rdro
