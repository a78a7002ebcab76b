#ifndef ECHOFORGE_ERRORS_H_
#define ECHOFORGE_ERRORS_H_

#include <stdexcept>
#include <string>

namespace echoforge {

// Base of every error thrown by the library. The CLI maps the subclasses
// onto exit codes (IoError -> 2, ConfigError -> 3).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid parameters or configuration. `field()` names the offending key
// when one is known (e.g. "mask.theta1").
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& message, std::string field = {})
      : Error(message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

// Mismatched block, frame or buffer lengths.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Non-finite samples, out-of-range probabilities and similar bad data.
class InputError : public Error {
 public:
  using Error::Error;
};

// File could not be opened, read, written or parsed as audio.
class IoError : public Error {
 public:
  explicit IoError(const std::string& message, std::string path = {})
      : Error(message), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

// An estimator was used before it was initialized.
class StateError : public Error {
 public:
  using Error::Error;
};

}  // namespace echoforge

#endif  // ECHOFORGE_ERRORS_H_
