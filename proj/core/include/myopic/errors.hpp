#pragma once

#include <stdexcept>
#include <string>

namespace myopic {

/// Base for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "error"; }
};

/// Malformed input: invalid process, bad parameters, inconsistent files.
class ValidationError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "validation"; }
};

/// The request is well-formed but exceeds what the chosen method can do
/// exactly (an open MSP shallower than the horizon, a layer cap, ...).
class CapabilityError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "capability"; }
};

/// Filesystem or format failures.
class IoError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "io"; }
};

}  // namespace myopic
