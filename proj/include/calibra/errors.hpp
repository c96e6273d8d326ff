#pragma once

#include <stdexcept>
#include <string>

namespace calibra {

/// Raised when an input violates a documented precondition (CLI exit code 2).
class PreconditionError : public std::invalid_argument {
public:
    explicit PreconditionError(const std::string& what) : std::invalid_argument(what) {}
};

/// Raised when an internal consistency check fails, i.e. two routes that a
/// theorem says must agree disagree numerically (CLI exit code 3).
class TripwireError : public std::runtime_error {
public:
    explicit TripwireError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace calibra
