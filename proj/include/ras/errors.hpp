#pragma once

#include <stdexcept>
#include <string>

namespace ras {

// Two-moment fitting failed (scv below the configured floor, or the matrix
// dimension needed to represent it exceeds the cap).
struct FitError : std::runtime_error {
    explicit FitError(const std::string& what) : std::runtime_error(what) {}
};

// Objective evaluation failed (dimension cap exceeded, numerical-health
// violation, unsupported degenerate input).
struct EvalError : std::runtime_error {
    explicit EvalError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed instance/solution/manifest file.
struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ras
