#pragma once

#include <stdexcept>
#include <string>

namespace rbmflow {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A point required to lie on the boundary is farther than tol_bdry from it.
struct BoundaryViolation : Error {
    using Error::Error;
};

// A proposed step exits the domain by more than the reach; dt is too large.
struct StepSizeError : Error {
    using Error::Error;
};

// Step budget exhausted before the simulation horizon was reached.
struct BudgetError : Error {
    using Error::Error;
};

// Requested local time exceeds the path's final accumulated local time.
struct InsufficientPathError : Error {
    using Error::Error;
};

// Excursion decomposition of a path that never touched the boundary.
struct NoBoundaryHitError : Error {
    using Error::Error;
};

// Newton projection failed to converge within its iteration cap.
struct NumericalFailure : Error {
    using Error::Error;
};

// Invalid CLI flag, config file entry, or experiment setup.
struct ConfigError : Error {
    using Error::Error;
};

// 2D-only operation invoked on a domain of a different dimension.
struct DimensionError : Error {
    using Error::Error;
};

}  // namespace rbmflow
