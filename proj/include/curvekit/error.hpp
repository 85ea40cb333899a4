#pragma once

#include <stdexcept>
#include <string>

namespace curvekit {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside an operation's mathematical domain (t <= 0, etc.).
class DomainError : public Error {
public:
    using Error::Error;
};

/// A type invariant does not hold. Messages name the offending bond and field.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Input file does not follow the snapshot/config schema.
class ParseError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// A root solve has no solution inside its bracket (YTM, bootstrap knot).
class NoSolutionError : public Error {
public:
    using Error::Error;
};

/// An estimator could not produce a curve (precondition or convergence).
class FitError : public Error {
public:
    using Error::Error;
};

/// Kernel system could not be factorized even after jitter escalation.
class SingularSystemError : public FitError {
public:
    SingularSystemError(const std::string& what, double condition_estimate)
        : FitError(what), condition_estimate_(condition_estimate) {}

    double condition_estimate() const noexcept { return condition_estimate_; }

private:
    double condition_estimate_;
};

/// Training produced a non-finite loss.
class DivergenceError : public FitError {
public:
    DivergenceError(const std::string& what, int epoch, int bond_index)
        : FitError(what), epoch_(epoch), bond_index_(bond_index) {}

    int epoch() const noexcept { return epoch_; }
    int bond_index() const noexcept { return bond_index_; }

private:
    int epoch_;
    int bond_index_;
};

/// Spot yield implied by a fitted discount function is undefined (d <= 0).
class InvalidDiscountError : public Error {
public:
    using Error::Error;
};

} // namespace curvekit
