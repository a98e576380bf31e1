#pragma once

#include <stdexcept>
#include <string>

namespace dgrecon {

/// Raised when a numerical setup (quadrature, exponents) cannot deliver the
/// requested exactness.
class ConfigurationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// The requested operation is not available for this space realization.
class UnsupportedConfiguration : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// A slab solve failed. Carries the 0-based interval index and the last
/// residual norm seen (NaN when no iteration ran).
class NumericalFailure : public std::runtime_error {
public:
    NumericalFailure(const std::string& what, int interval, double residual)
        : std::runtime_error(what), interval_(interval), residual_(residual) {}

    int interval() const noexcept { return interval_; }
    double residual() const noexcept { return residual_; }

private:
    int interval_;
    double residual_;
};

} // namespace dgrecon
