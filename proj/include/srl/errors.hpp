#pragma once

#include <stdexcept>
#include <string>

namespace srl {

/// Invalid or inconsistent configuration / input values. CLI exit code 2.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A numerical procedure failed to converge or produced invalid results.
/// CLI exit code 3.
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A requested computation exceeds a configured resource cap. CLI exit code 4.
struct BudgetError : std::runtime_error {
    explicit BudgetError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace srl
