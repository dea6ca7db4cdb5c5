#pragma once

#include <stdexcept>
#include <string>

namespace isrulog {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the domain of a function (e.g. PWL evaluated past its last breakpoint).
class DomainError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Scenario document problem; `path` is a JSON pointer to the offending element.
class SchemaError : public Error {
 public:
  SchemaError(std::string path, const std::string& what)
      : Error(path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

class MpsError : public Error {
 public:
  MpsError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace isrulog
