#pragma once

#include <stdexcept>
#include <string>

namespace hjq {

/// Base class for all errors raised by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Raised when an input expression leaves the polynomial fragment
/// (division by a non-constant, negative powers, and so on).
struct UnsupportedExpressionError : Error {
    using Error::Error;
};

/// Syntax or validation failure while reading a model description.
struct ParseError : Error {
    int line = 0;
    int column = 0;
    ParseError(const std::string& msg, int l, int c)
        : Error(msg + " (line " + std::to_string(l) + ", column " + std::to_string(c) + ")"),
          line(l), column(c) {}
    explicit ParseError(const std::string& msg) : Error(msg) {}
};

/// Structural problem with a model (bad table, duplicate symbol, ...).
struct ModelError : Error {
    using Error::Error;
};

/// A computed object violates an internal identity that should hold by
/// construction, e.g. a velocity symbol surviving into a Hamiltonian.
struct InternalError : Error {
    using Error::Error;
};

} // namespace hjq
