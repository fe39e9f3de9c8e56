#pragma once

#include <stdexcept>
#include <string>

namespace greenprem {

/// Input violates a documented precondition or type invariant.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A ratio or normalisation has a zero (or numerically vanishing) denominator.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A schedule cannot produce a value for the requested year or field.
class ResolutionError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

} // namespace greenprem
