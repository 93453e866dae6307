#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lurk {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input; `line()` is 1-based and counts the header row.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string &what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class UnknownNodeError : public Error {
public:
    using Error::Error;
};

/// An argument violates an operation's precondition.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

} // namespace lurk
