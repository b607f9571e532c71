// errors.hpp: exception hierarchy shared by all solvers

#pragma once

#include <stdexcept>
#include <string>

namespace superabsorb {

// Invalid physical parameter (|M| > J, negative rate, N too small, ...).
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

// Malformed or inconsistent configuration (unknown keys, empty tables, ...).
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

// Problem too large for the configured dimension cap or term budget.
class CapacityError : public std::length_error {
public:
    explicit CapacityError(const std::string& what) : std::length_error(what) {}
};

// Integration or sampling failure (step-size underflow, zero jump weight, ...).
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace superabsorb
