#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace diffar {

// Base class for every error thrown by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Argument values violate a documented precondition (bad lengths, non-finite
// inputs, out-of-range orders or lags).
class InvalidInputError : public Error {
public:
    using Error::Error;
};

// An AR model object violates its own invariants (non-causal coefficients,
// non-positive innovation variance, order/coefficient mismatch).
class InvalidModelError : public Error {
public:
    using Error::Error;
};

// A changepoint configuration is inconsistent with itself or with the series
// it is applied to.
class InvalidConfigError : public Error {
public:
    using Error::Error;
};

// The data carry no usable variation (constant differences, zero-variance
// windows, zero lag-1 spread).
class DegenerateSeriesError : public Error {
public:
    using Error::Error;
};

// A linear system is too ill-conditioned to solve reliably; the message
// carries the condition number.
class NumericalDegeneracyError : public Error {
public:
    using Error::Error;
};

// The fitted model cannot drive a parametric bootstrap (non-causal fit or
// invalid innovation variance).
class CannotBootstrapError : public Error {
public:
    using Error::Error;
};

// Text input could not be parsed. `line()` is 1-based, 0 when unknown.
class ParseError : public Error {
public:
    explicit ParseError(const std::string& what, std::size_t line = 0)
        : Error(line > 0 ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}

    [[nodiscard]] std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_ = 0;
};

}  // namespace diffar
