#pragma once

#include <stdexcept>
#include <string>

namespace xfer {

// Input errors map to CLI exit code 2, domain/numeric errors to exit code 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual bool is_domain_error() const noexcept { return false; }
};

class InputError : public Error {
 public:
  using Error::Error;
};

class WriteError : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class CorruptError : public Error {
 public:
  using Error::Error;
};

class ManifestError : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class DegenerateDistanceError : public Error {
 public:
  DegenerateDistanceError(const std::string& msg, std::string group = {})
      : Error(msg), group_(std::move(group)) {}
  bool is_domain_error() const noexcept override { return true; }
  const std::string& group() const noexcept { return group_; }

 private:
  std::string group_;
};

class SingularError : public Error {
 public:
  using Error::Error;
  bool is_domain_error() const noexcept override { return true; }
};

class NumericsError : public Error {
 public:
  using Error::Error;
  bool is_domain_error() const noexcept override { return true; }
};

}  // namespace xfer
