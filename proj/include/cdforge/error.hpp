#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace cdforge {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A block holds a repeated element, a negative element, or one outside Z_v.
class InvalidBlock : public Error {
public:
    using Error::Error;
};

/// An object is malformed for its kind (h does not divide v, ragged matrix,
/// groups that do not partition the points, ...). Distinct from an "invalid"
/// verdict, which is reported through a Certificate.
class StructuralError : public Error {
public:
    using Error::Error;
};

/// A precondition on a scalar argument failed (p not prime, wrong congruence).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A recipe asked for something that provably or possibly does not exist.
class NotConstructible : public Error {
public:
    using Error::Error;
};

/// A search leaf ran out of nodes or wall time. `context` names the plan path.
class BudgetExceeded : public Error {
public:
    BudgetExceeded(const std::string& what, std::string context)
        : Error(what), context_(std::move(context)) {}

    const std::string& context() const noexcept { return context_; }

private:
    std::string context_;
};

/// A document failed to parse. `path()` is a JSON-pointer-style location.
class ParseError : public Error {
public:
    ParseError(std::string path, const std::string& what)
        : Error(path.empty() ? what : path + ": " + what), path_(std::move(path)) {}

    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

}  // namespace cdforge
