#pragma once

#include <stdexcept>
#include <string>

namespace bayeslab {

// Bad arguments from the caller (CLI maps these to exit code 2).
class parameter_error : public std::invalid_argument {
public:
    explicit parameter_error(const std::string& what) : std::invalid_argument(what) {}
};

// A runtime numeric safeguard tripped: envelope bound violated, tail mass not
// meeting its budget, enumeration too large, divergence. CLI exit code 3.
class numeric_guard_error : public std::runtime_error {
public:
    explicit numeric_guard_error(const std::string& what) : std::runtime_error(what) {}
    numeric_guard_error(const std::string& what, double offending)
        : std::runtime_error(what), offending_value(offending), has_offending(true) {}

    double offending_value = 0.0;
    bool has_offending = false;
};

}  // namespace bayeslab
