#pragma once

#include <stdexcept>
#include <string>

namespace gcx {

// Malformed or inconsistent arguments (dimension mismatch, empty grid, ...).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The operation is not defined for this kind of input (e.g. LP oracle on a
// kernel that is not affine in x).
class UnsupportedError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// A configured size cap would be exceeded.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// NaN/Inf encountered where a finite number is required.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace gcx
