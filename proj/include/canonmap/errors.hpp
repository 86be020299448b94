#pragma once

#include <stdexcept>
#include <string>

namespace canonmap {

// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed caller input: bad dimensions, invalid permutation, weights that
// do not sum to one, and the like.
class ArgumentError : public Error {
public:
    explicit ArgumentError(const std::string& what) : Error(what) {}
};

// Matrix dimensions inconsistent with the annotated tensor shape.
class ShapeError : public Error {
public:
    explicit ShapeError(const std::string& what) : Error(what) {}
};

// A precondition stated by an operation's contract was violated,
// e.g. a non-Hermitian matrix handed to the Hermitian eigensolver.
class ContractViolation : public Error {
public:
    explicit ContractViolation(const std::string& what) : Error(what) {}
};

// A pure state on a composite space failed to factor: some single-factor
// reduction is mixed. Carries the worst factor and its second eigenvalue.
class EntangledError : public Error {
public:
    EntangledError(const std::string& what, int factor, double second_eigenvalue)
        : Error(what), factor_index(factor), second_eigenvalue(second_eigenvalue) {}
    int factor_index;          // 1-based factor whose reduction is most mixed
    double second_eigenvalue;  // its second-largest eigenvalue
};

// Failure raised while evaluating a state-map oracle (missing table key,
// output of the wrong dimension, domain violation).
class OracleError : public Error {
public:
    explicit OracleError(const std::string& what) : Error(what) {}
};

}  // namespace canonmap
