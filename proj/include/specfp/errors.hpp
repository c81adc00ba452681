#pragma once

#include <stdexcept>
#include <string>

namespace specfp {

// Base class for all contract violations raised by this library.
// The CLI maps these onto exit code 2 (usage / bad input).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
 public:
  using Error::Error;
};

class InvalidParameter : public Error {
 public:
  using Error::Error;
};

class InsufficientData : public Error {
 public:
  using Error::Error;
};

class UnsupportedFormat : public Error {
 public:
  using Error::Error;
};

class CorruptFile : public Error {
 public:
  using Error::Error;
};

class IncompatibleFingerprint : public Error {
 public:
  using Error::Error;
};

}  // namespace specfp
