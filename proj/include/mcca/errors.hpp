#pragma once

#include <stdexcept>
#include <string>

namespace mcca {

/// Bad user input: malformed files, invalid ranks, shape mismatches.
struct InvalidInput : std::runtime_error {
    explicit InvalidInput(const std::string& msg) : std::runtime_error(msg) {}
};

/// Numerical failure: eigensolver did not converge, non-finite data.
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace mcca
