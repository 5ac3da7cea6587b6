#pragma once

#include <stdexcept>
#include <string>

namespace nagur {

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed text in one of the exact grammars, or a structurally invalid input file.
class ParseError : public Error {
public:
    using Error::Error;
};

/// Violated precondition on an argument (mismatched backends, wrong dimensions, ...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

class DivisionByZero : public Error {
public:
    DivisionByZero() : Error("division by zero") {}
    explicit DivisionByZero(const std::string& what) : Error(what) {}
};

/// A truncated Hahn series whose known terms all cancelled; its valuation is unknown.
class PrecisionExhausted : public Error {
public:
    using Error::Error;
};

/// A mathematical hypothesis of a construction does not hold for the given input.
/// Distinct from InvalidArgument: the input is well formed, the theorem just does not apply.
class HypothesisViolation : public Error {
public:
    using Error::Error;
};

} // namespace nagur
