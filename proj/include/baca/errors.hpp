#pragma once

#include <stdexcept>
#include <string>

namespace baca {

// Requested object would exceed a size guard (mesh level, dense assembly, ...).
struct SizeError : std::length_error {
  using std::length_error::length_error;
};

// Input violates a documented precondition.
struct PreconditionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Degenerate or otherwise unusable geometry.
struct GeometryError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed file contents (OFF, CSV, config).
struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RangeError : std::out_of_range {
  using std::out_of_range::out_of_range;
};

struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Unknown configuration key or out-of-range parameter value.
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

}  // namespace baca
