#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace symbridge {

// Invalid user-supplied configuration (bad grid, measure with no mass, ...).
// The CLI maps this to exit code 1.
struct config_error : std::runtime_error {
    explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

// An operation was called outside its stated domain (non-integral n*eta,
// point on the boundary, enumeration guard exceeded, ...).
struct precondition_error : std::runtime_error {
    explicit precondition_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical failure (overflow, divergence, truncation test). Exit code 2.
struct numerical_error : std::runtime_error {
    explicit numerical_error(const std::string& msg) : std::runtime_error(msg) {}
};

// An iterative solver hit its cap or oscillated. Carries the objective
// history so callers can dump it instead of silently keeping a partial result.
struct solver_error : numerical_error {
    solver_error(const std::string& msg, std::vector<double> track)
        : numerical_error(msg), value_track(std::move(track)) {}
    std::vector<double> value_track;
};

}  // namespace symbridge
