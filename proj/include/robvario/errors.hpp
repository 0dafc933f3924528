#ifndef ROBVARIO_ERRORS_HPP
#define ROBVARIO_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace robvario {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input outside an operation's mathematical domain.
class DomainError : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

/// A Cholesky pivot fell below the scale-relative tolerance.
class NotPositiveDefinite : public Error {
public:
    using Error::Error;
};

/// No usable rows, pairs or partitions survived extraction.
class EmptySample : public Error {
public:
    using Error::Error;
};

/// Combinatorial work would exceed the configured guard.
class TooLarge : public Error {
public:
    using Error::Error;
};

/// The estimator cannot be applied to this configuration.
class NotUsable : public Error {
public:
    using Error::Error;
};

/// Numerical procedure failed (e.g. singular data in every candidate subset).
class NumericalFailure : public Error {
public:
    using Error::Error;
};

/// Malformed text input; carries a 1-based line and column when known.
class ParseError : public Error {
public:
    ParseError(const std::string& what, int line = 0, int column = 0)
        : Error(line > 0 ? what + " (line " + std::to_string(line) + ", column " + std::to_string(column) + ")"
                         : what),
          line_(line),
          column_(column)
    {
    }

    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }

private:
    int line_;
    int column_;
};

} // namespace robvario

#endif // ROBVARIO_ERRORS_HPP
