#pragma once

#include <stdexcept>
#include <string>

namespace acnet {

enum class ErrorKind {
    domain,
    structural,
    convergence,
    numeric_degeneracy,
    capacity,
    data,
    usage,
    invariant_violation,
    unsupported,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

//! Root search ran out of iterations; carries the last bracket it held.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double lo, double hi)
        : Error(ErrorKind::convergence, what), lo_(lo), hi_(hi) {}

    double bracket_lo() const noexcept { return lo_; }
    double bracket_hi() const noexcept { return hi_; }

private:
    double lo_;
    double hi_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what)
{
    throw Error(kind, what);
}

inline void require(bool cond, ErrorKind kind, const char* what)
{
    if (!cond) throw Error(kind, what);
}

} // namespace acnet
