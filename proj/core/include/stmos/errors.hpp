#pragma once

#include <stdexcept>
#include <string>

namespace stmos {

// Error taxonomy shared by the library and the CLI. Each family maps to a
// distinct process exit code (see tools/).
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad caller-supplied arguments, shapes, or flags. Exit code 2.
struct ArgumentError : Error {
  using Error::Error;
};

// Index outside the valid range of a sequence.
struct RangeError : ArgumentError {
  using ArgumentError::ArgumentError;
};

// Malformed file contents or on-disk layout. Exit code 3.
struct FormatError : Error {
  using Error::Error;
};

// Invalid data values inside an otherwise well-formed container.
struct DataError : FormatError {
  using FormatError::FormatError;
};

// Unsupported or missing container version field.
struct VersionError : FormatError {
  using FormatError::FormatError;
};

// Filesystem failures: unreadable, unwritable, missing paths. Exit code 4.
struct IoError : Error {
  using Error::Error;
};

// A component violated an internal contract (e.g. an inference callback
// returned the wrong shape). Exit code 5.
struct ContractError : Error {
  using Error::Error;
};

// Numerically undefined request, e.g. normalizing zero sites.
struct NumericError : ContractError {
  using ContractError::ContractError;
};

}  // namespace stmos
