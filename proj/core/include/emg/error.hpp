#pragma once

#include <stdexcept>
#include <string>

namespace emg {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument is outside the operation's domain (bad order, K > M, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Input data violates a precondition (non-finite samples, empty sets, ...).
class DataError : public Error {
 public:
  using Error::Error;
};

/// A file, frame or datagram could not be decoded.
class DecodeError : public Error {
 public:
  using Error::Error;
};

}  // namespace emg
