#pragma once

#include <stdexcept>
#include <string>

namespace o2nc {

// Bad user input: malformed config, inconsistent options, invalid JSON.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Requested constants fall outside the regime the parameter formulas
// cover (for example epsilon too large relative to G + sigma).
struct RegimeError : ConfigError {
    explicit RegimeError(const std::string& msg) : ConfigError(msg) {}
};

// An iterate or gradient stopped being finite.  Carries the step index.
struct DivergenceError : std::runtime_error {
    DivergenceError(const std::string& msg, long long at_step)
        : std::runtime_error(msg + " at step " + std::to_string(at_step)), step(at_step) {}
    long long step;
};

}  // namespace o2nc
