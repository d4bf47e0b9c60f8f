#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fts {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    /// Short machine-readable tag used by the CLI error line.
    [[nodiscard]] virtual const char* code() const noexcept { return "error"; }
};

class DimensionError : public Error {
public:
    using Error::Error;
    [[nodiscard]] const char* code() const noexcept override { return "dimension"; }
};

class IndexError : public Error {
public:
    using Error::Error;
    [[nodiscard]] const char* code() const noexcept override { return "index"; }
};

class InvalidArgument : public Error {
public:
    using Error::Error;
    [[nodiscard]] const char* code() const noexcept override { return "invalid_argument"; }
};

/// Raised when T = M*N with even N cannot hold. Carries the largest M' <= M
/// for which it does (0 when none exists, i.e. T odd).
class DesignError : public Error {
public:
    DesignError(const std::string& what, std::size_t largest_admissible)
        : Error(what), largest_admissible_(largest_admissible) {}
    [[nodiscard]] std::size_t largest_admissible_blocks() const noexcept { return largest_admissible_; }
    [[nodiscard]] const char* code() const noexcept override { return "invalid_design"; }

private:
    std::size_t largest_admissible_;
};

/// The null-variance estimate vanished, so the statistic cannot be standardized.
class DegenerateInputError : public Error {
public:
    using Error::Error;
    [[nodiscard]] const char* code() const noexcept override { return "degenerate_input"; }
};

class SimulationError : public Error {
public:
    using Error::Error;
    [[nodiscard]] const char* code() const noexcept override { return "simulation"; }
};

class ParseError : public Error {
public:
    using Error::Error;
    [[nodiscard]] const char* code() const noexcept override { return "parse"; }
};

}  // namespace fts
