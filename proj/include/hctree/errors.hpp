#pragma once

#include <stdexcept>
#include <string>

namespace hctree {

/// Invalid argument for a mathematical operation (non-positive field, k out of range, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Raised by the closed-form two-cycle solvers when the activity is at or below the
/// critical value and no asymmetric pair exists.
class NoAsymmetricSolution : public DomainError {
public:
    using DomainError::DomainError;
};

/// A solver stopped without meeting its residual tolerance.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double residual, int iterations)
        : std::runtime_error(what), residual_(residual), iterations_(iterations) {}

    double residual() const noexcept { return residual_; }
    int iterations() const noexcept { return iterations_; }

private:
    double residual_;
    int iterations_;
};

/// Exhaustive enumeration requested on a ball larger than the enumeration cap.
class SizeError : public std::length_error {
public:
    using std::length_error::length_error;
};

/// Two results that cannot both hold were produced (e.g. a measure proven extremal
/// and non-extremal at once).
class ConsistencyError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace hctree
