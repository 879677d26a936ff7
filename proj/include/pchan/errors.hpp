#pragma once

#include <stdexcept>
#include <string>

namespace pchan {

/// Invalid argument to a numerical operation (negative loss input, bad prior, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A truncated sum or adaptive integration stopped before meeting its tolerance.
/// The best available estimate is carried along.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double partial)
        : std::runtime_error(what), partial_(partial) {}
    double partial() const noexcept { return partial_; }

private:
    double partial_;
};

/// Semi-infinite integrand failed to decay.
class DivergenceError : public ConvergenceError {
public:
    using ConvergenceError::ConvergenceError;
};

/// Two routes to the same quantity disagreed beyond tolerance.
class ConsistencyError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// A closed-form expression disagreed with its quadrature reference.
class TranscriptionError : public ConsistencyError {
public:
    using ConsistencyError::ConsistencyError;
};

/// Requested problem size exceeds what the enumeration engine supports.
class CapabilityError : public std::length_error {
public:
    using std::length_error::length_error;
};

}  // namespace pchan
