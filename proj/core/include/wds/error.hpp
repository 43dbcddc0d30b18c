#pragma once

#include <stdexcept>
#include <string>

namespace wds {

/// Base class for every error thrown by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Input has zero total variance (e.g. all rows identical) or too few rows.
struct DegenerateData : Error {
    using Error::Error;
};

/// Input contains NaN or Inf.
struct NonFinite : Error {
    using Error::Error;
};

/// Operand shapes are incompatible.
struct DimensionMismatch : Error {
    using Error::Error;
};

/// Scalar argument outside its admissible range.
struct RangeError : Error {
    using Error::Error;
};

/// Index outside the addressed container.
struct IndexOutOfRange : Error {
    using Error::Error;
};

/// Operation applied to a tensor in the wrong scale.
struct ScaleError : Error {
    using Error::Error;
};

/// Log-magnitude conversion applied to a tensor that is already in dB.
struct AlreadyLogScale : ScaleError {
    using ScaleError::ScaleError;
};

/// Negative linear magnitude encountered.
struct NegativeMagnitude : Error {
    using Error::Error;
};

/// Malformed container file (bad magic, version, declared sizes, trailing bytes).
struct FormatError : Error {
    using Error::Error;
};

/// Unparseable text input; message carries the row/column location.
struct ParseError : Error {
    using Error::Error;
};

/// Filesystem-level failure.
struct IoError : Error {
    using Error::Error;
};

} // namespace wds
