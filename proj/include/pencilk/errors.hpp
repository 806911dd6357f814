#pragma once

#include <stdexcept>
#include <string>

namespace pencilk {

// Thrown when a compound order k is outside the valid range for the operand.
class InvalidOrderError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Dimension mismatch or malformed operand shape.
class ShapeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// An index tuple that is not a member of the expected lexicographic sequence.
class NotAMemberError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

// Malformed input file or value (CLI matrix files).
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// The pencil has no spectrum: det(A - lambda*B) vanishes identically.
class SingularPencilError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A factorization failed to meet its postcondition tolerances.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Analysis requested on a system whose pencil is singular.
class UntractableSystemError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// The invertible core of a Drazin computation is numerically unreliable.
class IllConditionedError : public std::runtime_error {
public:
    IllConditionedError(const std::string& what, double condition)
        : std::runtime_error(what), condition(condition) {}
    double condition;
};

// Propagation from an initial state outside the consistency subspace.
class InconsistentInitialConditionError : public std::runtime_error {
public:
    InconsistentInitialConditionError(const std::string& what, double distance,
                                      long column = -1)
        : std::runtime_error(what), distance(distance), column(column) {}
    double distance;   // orthogonal distance from the consistency subspace
    long column;       // offending column for multi-column inputs, else -1
};

// A supplied (lambda, v) pair fails its eigenpair residual check.
class NotAnEigenpairError : public std::runtime_error {
public:
    NotAnEigenpairError(const std::string& what, double residual)
        : std::runtime_error(what), residual(residual) {}
    double residual;
};

// Structural hypothesis of the requested operation does not hold.
class HypothesisError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace pencilk
