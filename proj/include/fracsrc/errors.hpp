#pragma once

#include <stdexcept>
#include <string>

namespace fracsrc {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A numerical procedure failed to reach its accuracy target.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what, double achieved_error = 0.0)
        : std::runtime_error(what), achieved_error_(achieved_error) {}

    double achieved_error() const noexcept { return achieved_error_; }

private:
    double achieved_error_;
};

/// Malformed or inconsistent configuration / input file.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace fracsrc
