#pragma once

#include <stdexcept>
#include <string>

namespace su2qec {

// Refusal to materialize a state/operator whose dimension exceeds the
// explicit-vector feasibility guard, or whose site indices are invalid.
struct DimensionError : std::runtime_error {
    explicit DimensionError(const std::string& msg) : std::runtime_error(msg) {}
};

// A numerical contract was violated (norm drift, completeness residual,
// eigen-residual, PSD tolerance, ...). Distinct from a caller-side domain
// error: this signals that a computed quantity failed its own invariant.
struct NumericsError : std::runtime_error {
    explicit NumericsError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace su2qec
