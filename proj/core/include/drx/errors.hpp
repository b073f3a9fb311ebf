#pragma once

#include <stdexcept>
#include <string>

namespace drx {

// Invalid inputs are reported with std::invalid_argument throughout the
// library. The types below cover the remaining failure classes.

/// Malformed, truncated or version-mismatched file contents.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A checkpoint tensor whose shape does not match the model being loaded.
class ShapeError : public FormatError {
 public:
  using FormatError::FormatError;
};

/// File-system failures (open, read, write, lock).
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when the training loss becomes non-finite.
class TrainingDiverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace drx
