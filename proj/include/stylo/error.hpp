#pragma once

#include <stdexcept>
#include <string>

namespace stylo {

/// Bad input: malformed text, violated precondition, unreadable file.
class InputError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// The solver failed to reach the requested KKT tolerance, or the
/// problem has no feasible point.
class ConvergenceError : public std::runtime_error
{
public:
    ConvergenceError(const std::string& what, double violation)
        : std::runtime_error(what), violation_(violation)
    {
    }

    double violation() const noexcept { return violation_; }

private:
    double violation_;
};

/// Conditional probability requested for a context that never occurs
/// with a following character.
class UndefinedContextError : public InputError
{
public:
    using InputError::InputError;
};

} // namespace stylo
