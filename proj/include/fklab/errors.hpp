#pragma once

#include <stdexcept>
#include <string>

namespace fklab {

// Invalid model data or arguments; CLI maps this to exit code 2.
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Dense state-space blow-up past the configured cap; CLI maps this to exit code 3.
struct CapacityError : std::runtime_error {
    explicit CapacityError(const std::string& what) : std::runtime_error(what) {}
};

// Exact integer combinatorics left the 64-bit range.
struct OverflowError : std::runtime_error {
    explicit OverflowError(const std::string& what) : std::runtime_error(what) {}
};

// Backward sampling hit a transition no particle can explain.
struct UnreachableTransitionError : std::runtime_error {
    explicit UnreachableTransitionError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace fklab
