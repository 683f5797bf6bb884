#pragma once

#include <stdexcept>
#include <string>

namespace actopo {

// Base of every error raised by the library. The CLI maps IoError to exit
// code 3 and everything else to exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Wrong magic, version, dtype or file structure.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Structurally valid header whose payload does not match it.
class CorruptionError : public Error {
 public:
  using Error::Error;
};

// Parsed value violates a domain invariant (NaN, death <= birth, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Text cell could not be parsed as a number.
class ParseError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Caller passed arguments outside an operation's preconditions.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

class BoundsError : public Error {
 public:
  using Error::Error;
};

}  // namespace actopo
