#pragma once

#include <stdexcept>
#include <string>

namespace henon {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument violates an operation's precondition.
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// A numerical method failed to produce a result it can vouch for.
class SolverError : public Error {
public:
    using Error::Error;
};

/// Two independent computations of the same quantity disagree.
class OracleMismatch : public Error {
public:
    using Error::Error;
};

/// A run configuration is malformed or out of range.
class ConfigError : public Error {
public:
    using Error::Error;
};

inline void require(bool ok, const std::string& what)
{
    if (!ok) throw PreconditionError(what);
}

} // namespace henon
