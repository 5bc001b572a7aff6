// errors.hpp: exception types shared by every ncthermo module

#pragma once

#include <stdexcept>
#include <string>

namespace ncthermo {

// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Inconsistent inputs (mismatched kernel set, bad run configuration).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Floating-point failure: non-finite values, quadrature that could not reach
// its tolerance, derivative inconsistent with a pure state.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what, double error_estimate = 0.0)
        : std::runtime_error(what), error_estimate_(error_estimate) {}

    double error_estimate() const noexcept { return error_estimate_; }

private:
    double error_estimate_;
};

// Time stepping left the Bloch ball beyond the physicality slack.
class IntegrationError : public std::runtime_error {
public:
    IntegrationError(const std::string& what, double time)
        : std::runtime_error(what), time_(time) {}

    double time() const noexcept { return time_; }

private:
    double time_;
};

} // namespace ncthermo
