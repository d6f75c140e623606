#pragma once

#include <stdexcept>
#include <string>

namespace ibinet {

/// Invalid argument or configuration value supplied by the caller.
struct ParameterError : std::invalid_argument {
  explicit ParameterError(const std::string& msg) : std::invalid_argument(msg) {}
};

/// Tensor shapes do not line up for the requested operation.
struct ShapeError : std::invalid_argument {
  explicit ShapeError(const std::string& msg) : std::invalid_argument(msg) {}
};

/// Architecture description produces an impossible layer stack.
struct ArchitectureError : std::invalid_argument {
  explicit ArchitectureError(const std::string& msg) : std::invalid_argument(msg) {}
};

/// Signal does not satisfy the superposition-augmentation precondition.
struct AugmentationNotApplicable : std::runtime_error {
  explicit AugmentationNotApplicable(const std::string& msg) : std::runtime_error(msg) {}
};

/// A recording has too few R-peaks to form a single window.
struct EmptyWindowSet : std::runtime_error {
  explicit EmptyWindowSet(const std::string& msg) : std::runtime_error(msg) {}
};

/// Segment exceeds the fixed padded window length.
struct OversizeWindow : std::runtime_error {
  explicit OversizeWindow(const std::string& msg) : std::runtime_error(msg) {}
};

/// A statistic (Pearson r, weighted metric) is undefined on a zero-variance series.
struct DegenerateSeries : std::runtime_error {
  explicit DegenerateSeries(const std::string& msg) : std::runtime_error(msg) {}
};

/// Checkpoint file is unreadable: bad magic, version, CRC, or truncation.
struct CorruptCheckpoint : std::runtime_error {
  explicit CorruptCheckpoint(const std::string& msg) : std::runtime_error(msg) {}
};

/// Input files are missing, malformed, or inconsistent.
struct DataError : std::runtime_error {
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Training or evaluation produced non-finite values.
struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace ibinet
