#pragma once

#include <stdexcept>
#include <string>

namespace phm {

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

/// Eigen backend failed (no convergence, non-finite output, ...).
class NumericError : public Error {
public:
    using Error::Error;
};

/// A non-real eigenvalue has no conjugate partner at the requested tolerance.
class ClassificationError : public Error {
public:
    using Error::Error;
};

class DegeneracyError : public Error {
public:
    DegeneracyError(const std::string& what, std::size_t first, std::size_t second)
        : Error(what), first_(first), second_(second) {}

    std::size_t first() const noexcept { return first_; }
    std::size_t second() const noexcept { return second_; }

private:
    std::size_t first_;
    std::size_t second_;
};

class IllConditionedError : public Error {
public:
    using Error::Error;
};

class InvalidParameterError : public Error {
public:
    using Error::Error;
};

/// A documented precondition on an input matrix does not hold (e.g. non-hermitian metric).
class ContractViolation : public Error {
public:
    using Error::Error;
};

/// Positive-definite metric requested for a matrix with complex eigenvalue pairs.
class NotSqhError : public Error {
public:
    using Error::Error;
};

/// Kernel of the intertwining operator and the parametrized family disagree in dimension.
class FamilyIncompleteError : public Error {
public:
    using Error::Error;
};

class CountOverflowError : public Error {
public:
    using Error::Error;
};

class GenerationError : public Error {
public:
    using Error::Error;
};

}  // namespace phm
