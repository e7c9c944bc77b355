#pragma once

#include <stdexcept>
#include <string>

namespace diqkd {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operator or state dimensions do not match the operation's requirements.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// A scalar argument lies outside its admissible range.
class DomainError : public Error {
public:
    using Error::Error;
};

/// An operator expected to be Hermitian is not, beyond tolerance.
class NotHermitianError : public Error {
public:
    using Error::Error;
};

/// An observable expected to square to the identity does not.
class NotDichotomicError : public Error {
public:
    using Error::Error;
};

/// A CHSH value above the Tsirelson bound was supplied to a quantum bound.
class UnphysicalViolationError : public Error {
public:
    using Error::Error;
};

/// The requested quantity is not defined in the given parameter regime.
class UndefinedInRegimeError : public Error {
public:
    using Error::Error;
};

/// An estimator cannot be formed because a setting pair has no samples.
class EstimationUndefinedError : public Error {
public:
    using Error::Error;
};

/// A root finder found no sign change on its bracket.
class NoRootError : public Error {
public:
    using Error::Error;
};

/// An iterative routine failed to converge within its iteration budget.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

}  // namespace diqkd
