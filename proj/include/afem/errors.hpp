#pragma once

#include <stdexcept>
#include <string>

namespace afem {

/// Invalid arguments: unknown ids, size mismatches, points outside an element.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Point location failed (point not inside the meshed domain).
class LookupError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A singular function was evaluated at its singularity.
class SingularityError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Factorization or solve failure.
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace afem
