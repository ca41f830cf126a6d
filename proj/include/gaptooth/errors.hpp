#pragma once

#include <stdexcept>
#include <string>

namespace gaptooth {

/// Inconsistent or out-of-range configuration (policy mismatch, bad n, r, K...).
struct ConfigurationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// An exact linear system had no pivot where one was required.
struct SingularMatrixError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// The slow-manifold iteration could not be completed.
struct ConstructionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A time integration produced NaN or overflowed.
struct DivergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A stencil offset fell outside the padded grid.
struct IndexError : std::out_of_range {
    using std::out_of_range::out_of_range;
};

}  // namespace gaptooth
