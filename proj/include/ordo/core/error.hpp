#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ordo {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed textual input (symbols, measures, potentials, configs).
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line, std::size_t column)
        : Error(what + " (line " + std::to_string(line) + ", column " + std::to_string(column) + ")"),
          line_(line), column_(column) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

/// A precondition on numeric arguments was violated.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Series operations divide by q_B - q_A.
class DegenerateEndpoints : public DomainError {
public:
    DegenerateEndpoints() : DomainError("degenerate endpoints: q_A == q_B") {}
};

/// Endpoint map p_A -> q(eps) is singular (or nearly so).
class ConjugatePoint : public Error {
public:
    using Error::Error;
};

/// Iterative solver hit its iteration cap.
class NoConvergence : public Error {
public:
    using Error::Error;
};

/// Trajectory left the representable range.
class NumericOverflow : public Error {
public:
    using Error::Error;
};

/// Symbol outside the class an operation supports (p-degree, magnetic term, ...).
class UnsupportedSymbol : public DomainError {
public:
    using DomainError::DomainError;
};

} // namespace ordo
