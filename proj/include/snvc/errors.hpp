#pragma once

#include <stdexcept>
#include <string>

namespace snvc {

/// Malformed input data (calibration text, label lines, binary containers).
/// The message names the offending file, key or line where known.
struct FormatError : std::runtime_error {
  explicit FormatError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A numerically ill-posed request, e.g. a registration problem whose total
/// weight is zero.
struct DegenerateInputError : std::invalid_argument {
  explicit DegenerateInputError(const std::string& msg)
      : std::invalid_argument(msg) {}
};

}  // namespace snvc
