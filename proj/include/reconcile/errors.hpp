#pragma once

#include <stdexcept>
#include <string>

namespace recon {

// Base for every error raised by the library. The CLI maps subclasses to
// exit codes, so keep the hierarchy shallow.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class AlignmentError : public Error {
 public:
  using Error::Error;
};

class EmptyGroupError : public Error {
 public:
  using Error::Error;
};

class ParameterError : public Error {
 public:
  using Error::Error;
};

// Malformed input data, such as non-finite or out-of-range values.
class InputError : public Error {
 public:
  using Error::Error;
};

class OverlapError : public Error {
 public:
  OverlapError(const std::string& what, int round) : Error(what), round_(round) {}
  int round() const noexcept { return round_; }

 private:
  int round_;
};

class GenerationError : public Error {
 public:
  using Error::Error;
};

class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

}  // namespace recon
