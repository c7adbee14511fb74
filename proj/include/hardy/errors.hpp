#pragma once

#include <stdexcept>
#include <string>

namespace hardy {

/// Argument outside the domain of a function (t <= 0, empty input, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A mathematical hypothesis of an operation does not hold for the input.
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// An integral that must be finite was found to diverge.
class DivergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Numerical evidence was insufficient for a verdict.
class InconclusiveError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A tabulated weight was queried outside its grid.
class ExtrapolationError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

/// An integrand produced NaN or +inf at an interior node.
class EvaluationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace hardy
