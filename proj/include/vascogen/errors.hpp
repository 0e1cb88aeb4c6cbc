#pragma once

#include <stdexcept>
#include <string>

namespace vascogen {

// Base class for everything thrown by this library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Bad API use, bad configuration, malformed input data. CLI exit code 1.
class UsageError : public Error {
public:
  using Error::Error;
};

// Tree fails its physical/geometric invariants. CLI exit code 3.
class ValidationError : public Error {
public:
  using Error::Error;
};

// Unreadable/unwritable files. CLI exit code 4.
class IoError : public Error {
public:
  using Error::Error;
};

} // namespace vascogen
