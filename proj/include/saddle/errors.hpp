#pragma once

#include <stdexcept>
#include <string>

namespace saddle {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Operand shapes do not match the operation.
struct DimensionError : Error {
    using Error::Error;
};

/// A matrix required to be symmetric failed the symmetry check.
struct SymmetryError : Error {
    using Error::Error;
};

/// A pivot fell below the positive-definiteness tolerance.
struct NotPositiveDefiniteError : Error {
    using Error::Error;
};

/// A matrix required to have full row rank does not.
struct RankDeficientError : Error {
    using Error::Error;
};

/// Requested a dense-oracle operation above the supported order.
struct DenseThresholdError : Error {
    using Error::Error;
};

/// File parsing or manifest inconsistency.
struct IoError : Error {
    using Error::Error;
};

}  // namespace saddle
