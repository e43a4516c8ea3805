#pragma once

#include <stdexcept>
#include <string>

namespace lnspdc {

// Bad input files, unknown keys, malformed values. CLI exit class 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical failures: out-of-range evaluation, non-convergence, degenerate
// input. CLI exit class 3.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

class RangeError : public NumericError {
public:
    explicit RangeError(const std::string& what) : NumericError(what) {}
};

class ConvergenceError : public NumericError {
public:
    explicit ConvergenceError(const std::string& what) : NumericError(what) {}
};

} // namespace lnspdc
