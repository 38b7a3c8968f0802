#pragma once

#include <stdexcept>
#include <string>

namespace nwl {

// Invalid parameters, contract violations, malformed configs. CLI exit code 2.
class validation_error : public std::runtime_error {
public:
    explicit validation_error(const std::string& what) : std::runtime_error(what) {}
};

// Solver non-convergence, refused time steps, broken numerics. CLI exit code 3.
class numerical_error : public std::runtime_error {
public:
    explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace nwl
