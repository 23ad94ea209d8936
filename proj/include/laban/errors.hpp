#pragma once

#include <stdexcept>
#include <string>

namespace laban {

// Error taxonomy shared by the library and the CLI. The CLI maps these to
// stable process exit codes (config -> 2, numeric instability -> 3,
// degenerate evaluation -> 4, anything else -> 1).

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct TagError : ConfigError {
    explicit TagError(const std::string& msg) : ConfigError(msg) {}
};

struct DimensionError : std::runtime_error {
    explicit DimensionError(const std::string& msg) : std::runtime_error(msg) {}
};

struct NumericInstabilityError : std::runtime_error {
    explicit NumericInstabilityError(const std::string& msg) : std::runtime_error(msg) {}
};

struct EvalError : std::runtime_error {
    explicit EvalError(const std::string& msg) : std::runtime_error(msg) {}
};

struct IoError : std::runtime_error {
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace laban
