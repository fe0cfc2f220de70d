#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lexalign {

/// Base of every error the toolkit raises. `category()` is the stable tag used
/// in CLI diagnostics ("error: <category>: <detail>").
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* category() const noexcept { return "error"; }
};

/// Input violates a documented contract (bad values, missing ids, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
  const char* category() const noexcept override { return "validation"; }
};

/// A text file does not follow its grammar. Carries the 1-based line number.
class FormatError : public ValidationError {
 public:
  FormatError(std::size_t line, const std::string& what)
      : ValidationError("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }
  const char* category() const noexcept override { return "format"; }

 private:
  std::size_t line_;
};

/// File could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
  const char* category() const noexcept override { return "io"; }
};

/// Numerical routine failed to converge.
class NumericError : public Error {
 public:
  using Error::Error;
  const char* category() const noexcept override { return "numeric"; }
};

}  // namespace lexalign
