#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace delaylab {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Caller violated an operation's documented precondition.
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// Malformed expression text. `offset` is the byte offset of the failure.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t offset)
        : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

/// Evaluation left the domain of a function (log of a non-positive value,
/// division by zero, non-finite result). `subexpression` is the source text
/// of the offending node.
class DomainFault : public Error {
public:
    DomainFault(const std::string& what, std::string subexpression)
        : Error(what + " in '" + subexpression + "'"), subexpression_(std::move(subexpression)) {}
    const std::string& subexpression() const noexcept { return subexpression_; }

private:
    std::string subexpression_;
};

class UnknownModel : public Error {
public:
    using Error::Error;
};

/// The entry-exit integral does not return to zero inside the model window.
class NoExitInWindow : public Error {
public:
    using Error::Error;
};

/// Quadrature or root bracketing failed.
class NumericsError : public Error {
public:
    using Error::Error;
};

class IntegrationError : public Error {
public:
    enum class Kind { StepUnderflow, ZUnderflow, MaxSteps, LeftWindow, NonFinite };

    IntegrationError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

}  // namespace delaylab
