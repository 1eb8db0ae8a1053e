#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace vibrafin {

// Base of everything the toolkit throws on purpose.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad input: the CLI maps these to exit code 1.
class ValidationError : public Error {
public:
    ValidationError(std::string field, const std::string& message)
        : Error(field.empty() ? message : field + ": " + message), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

class OutOfRangeError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class ConfigurationError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

// Numerical breakdown: the CLI maps these to exit code 2.
class NumericalError : public Error {
public:
    using Error::Error;
};

class SingularityError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class IntegrationError : public NumericalError {
public:
    IntegrationError(std::string component, double t, const std::string& message)
        : NumericalError(message), component_(std::move(component)), time_(t) {}

    const std::string& component() const noexcept { return component_; }
    double time() const noexcept { return time_; }

private:
    std::string component_;
    double time_;
};

class NonFiniteObjectiveError : public NumericalError {
public:
    NonFiniteObjectiveError(std::vector<double> point, const std::string& message)
        : NumericalError(message), point_(std::move(point)) {}

    const std::vector<double>& point() const noexcept { return point_; }

private:
    std::vector<double> point_;
};

namespace detail {

inline void require(bool ok, const char* field, const std::string& message) {
    if (!ok) throw ValidationError(field, message);
}

inline void require_positive(double v, const char* field) {
    if (!(v > 0.0) || v != v || v > 1e300) throw ValidationError(field, "must be a positive finite value");
}

inline void require_non_negative(double v, const char* field) {
    if (!(v >= 0.0) || v > 1e300) throw ValidationError(field, "must be a non-negative finite value");
}

}  // namespace detail
}  // namespace vibrafin
