#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace flbandit {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A value violates a numeric or domain precondition.
class DomainError : public Error {
public:
    using Error::Error;
};

/// The caller assembled an unusable configuration (too few arms, unknown arm).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Aggregation was requested over an empty history.
class NoObservationsError : public Error {
public:
    NoObservationsError() : Error("no observations") {}
};

/// A round update did not carry exactly one score per arm.
class IncompleteFeedbackError : public Error {
public:
    using Error::Error;
};

/// Dataset text could not be parsed. `line()` is 1-based, 0 when not tied to a line.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
          line_(line) {}

    [[nodiscard]] std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// Session-service errors. The HTTP layer maps these to 400 / 404 / 409 / 500.

class ValidationError : public Error {
public:
    using Error::Error;
};

class NotFoundError : public Error {
public:
    using Error::Error;
};

class StateError : public Error {
public:
    using Error::Error;
};

class StorageError : public Error {
public:
    using Error::Error;
};

}  // namespace flbandit
