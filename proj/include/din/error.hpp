#pragma once

#include <stdexcept>
#include <string>

namespace din {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A value violates a documented precondition or invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Bad experiment configuration or topology request.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Dataset could not be read or parsed. Messages carry line/column when known.
class DataError : public Error {
 public:
  using Error::Error;
};

/// A saved model could not be restored.
class ModelFileError : public Error {
 public:
  enum class Kind { Version, Checksum, Format };

  ModelFileError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

}  // namespace din
