#pragma once

#include <stdexcept>
#include <string>

namespace wittlab {

/// Base class for all library errors.
struct error : std::runtime_error {
    explicit error(const std::string& what) : std::runtime_error(what) {}
};

/// Exact division was requested but the divisor does not divide the dividend.
struct not_divisible : error {
    explicit not_divisible(const std::string& what) : error(what) {}
};

/// A p-power division required by a ghost lift failed.
struct not_integral : error {
    explicit not_integral(const std::string& what) : error(what) {}
};

/// An Eisenstein computation ran out of tracked precision.
struct precision_exhausted : error {
    explicit precision_exhausted(const std::string& what) : error(what) {}
};

/// A symbolic expansion exceeded the configured term budget.
struct resource_budget_exceeded : error {
    explicit resource_budget_exceeded(const std::string& what) : error(what) {}
};

/// Truncation levels too small for the requested construction.
struct truncation_too_coarse : error {
    explicit truncation_too_coarse(const std::string& what) : error(what) {}
};

/// A lambda parameter violates the nonzerodivisor requirement.
struct invalid_lambda : error {
    explicit invalid_lambda(const std::string& what) : error(what) {}
};

/// Malformed or inconsistent run configuration.
struct config_error : error {
    explicit config_error(const std::string& what) : error(what) {}
};

} // namespace wittlab
