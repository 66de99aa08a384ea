#pragma once

#include <stdexcept>
#include <string>

namespace elmkit {

// Error taxonomy mirrored by the CLI exit codes:
//   ConfigError -> 1, DataError (and subclasses) -> 2, NumericError -> 3.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Invalid run configuration (bad flags, bad combinations, bad ratios).
struct ConfigError : Error {
    using Error::Error;
};

/// Problems with input data or serialized artifacts.
struct DataError : Error {
    using Error::Error;
};

struct ParseError : DataError {
    using DataError::DataError;
};

/// Label cell is not 0 or 1.
struct LabelError : DataError {
    using DataError::DataError;
};

/// Bad magic, version, or truncation in a binary file.
struct FormatError : DataError {
    using DataError::DataError;
};

/// Dimension mismatch between operands.
struct ShapeError : DataError {
    using DataError::DataError;
};

struct NumericError : Error {
    using Error::Error;
};

/// Factorization failed; usually means lambda = 0 on a singular Gram matrix.
struct SingularityError : NumericError {
    using NumericError::NumericError;
};

/// Training produced a non-finite value.
struct DivergenceError : NumericError {
    using NumericError::NumericError;
};

/// Metric is undefined on the given inputs (e.g. AUC on a single class).
struct UndefinedMetricError : NumericError {
    using NumericError::NumericError;
};

}  // namespace elmkit
