#pragma once

#include <stdexcept>
#include <string>

namespace dfo {

// Base of every error raised by the library. The CLI maps subclasses onto
// exit codes: ConfigError -> 2, DataError -> 3, StageError -> 4.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class DataError : public Error {
 public:
  using Error::Error;
};

// Missing prerequisite stage output or a config-hash mismatch in a run dir.
class StageError : public Error {
 public:
  using Error::Error;
};

}  // namespace dfo
