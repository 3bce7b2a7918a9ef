#pragma once

#include <functional>
#include <stdexcept>
#include <string>

namespace gw {

// Base of every failure raised by the library. The CLI maps these to exit code 3.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

class NotPositiveDefinite : public Error {
public:
    using Error::Error;
};

class NumericalFailure : public Error {
public:
    using Error::Error;
};

// A precondition on the value of an argument (range, domain, family membership).
class DomainError : public Error {
public:
    using Error::Error;
};

class UnsupportedPair : public Error {
public:
    using Error::Error;
};

class RadiusTooLarge : public DomainError {
public:
    RadiusTooLarge(const std::string& what, double max_radius)
        : DomainError(what), max_radius_(max_radius) {}
    double max_radius() const noexcept { return max_radius_; }

private:
    double max_radius_;
};

// Non-fatal diagnostics (e.g. ill-conditioned covariances). The handler is
// process-wide; installing and invoking it are both thread-safe.
using WarningHandler = std::function<void(const std::string&)>;

WarningHandler set_warning_handler(WarningHandler handler);
void warn(const std::string& message);

}  // namespace gw
