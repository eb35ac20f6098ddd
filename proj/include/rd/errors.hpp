#pragma once

#include <stdexcept>
#include <string>

namespace rd {

// Base class for everything this library throws. Subtypes exist so the CLI
// can map failure categories to distinct exit codes.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// shape / grid mismatch between operands
struct dim_error : error {
    using error::error;
};

// a spectral solve hit a pole of the requested symbol (singular mode)
struct pole_error : error {
    using error::error;
};

// parameter outside its admissible range (theory formulas, step sizes, ...)
struct domain_error : error {
    using error::error;
};

// solver divergence or non-convergence that the caller asked to be fatal
struct solve_error : error {
    using error::error;
};

// bad configuration input; carries the offending key for error reporting
struct config_error : error {
    std::string key;
    config_error(std::string k, const std::string& msg) : error(msg), key(std::move(k)) {}
};

} // namespace rd
