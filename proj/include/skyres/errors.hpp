#pragma once

#include <stdexcept>
#include <string>

namespace skyres {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Integrator step too large: a spin rotated by more than pi/2, or the
/// documented stability bound dt * max|H_eff| < 0.1 was violated.
struct StabilityViolation : Error {
    using Error::Error;
};

/// A requested texture does not fit the grid.
struct GeometryError : Error {
    using Error::Error;
};

/// Malformed input file (bad magic, shape mismatch, truncation).
struct FormatError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

/// Normal equations are rank-deficient and no ridge term was requested.
struct SingularSystem : Error {
    using Error::Error;
};

struct DimensionMismatch : Error {
    using Error::Error;
};

/// Train/test split does not fit the dataset.
struct SplitError : Error {
    using Error::Error;
};

/// A statistic is undefined on the given input (e.g. zero variance).
struct DegenerateInput : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

} // namespace skyres
