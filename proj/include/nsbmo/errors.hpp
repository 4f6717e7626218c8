#pragma once

#include <stdexcept>
#include <string>

namespace nsbmo {

/// Raised for invalid arguments: bad exponents, grid mismatches, negative times.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a serialized container cannot be decoded.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace nsbmo
