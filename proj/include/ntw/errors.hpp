#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ntw {

/// Bad argument or input data (maps to CLI exit code 2).
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// File could not be read, parsed or written (maps to CLI exit code 2).
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Internal API misuse, e.g. asking the reverse pass for a point that was never evaluated.
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// A loss, activation or parameter became non-finite (maps to CLI exit code 1).
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(const std::string& what, std::size_t step)
        : std::runtime_error(what + " (update " + std::to_string(step) + ")"), step_(step) {}

    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

}  // namespace ntw
