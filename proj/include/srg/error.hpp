#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace srg {

enum class ErrorCode {
  InvalidArgument = 1,
  Parse = 2,
  Io = 3,
  Numeric = 4,
  Diverged = 5,
  Internal = 6,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what)
      : Error(ErrorCode::InvalidArgument, what) {}
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(ErrorCode::Parse, "line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCode::Io, what) {}
};

// Raised when a step produces a non-finite gradient; carries the component.
class NumericError : public Error {
 public:
  NumericError(std::size_t component, const std::string& what)
      : Error(ErrorCode::Numeric, what), component_(component) {}
  std::size_t component() const noexcept { return component_; }

 private:
  std::size_t component_;
};

class DivergenceError : public Error {
 public:
  explicit DivergenceError(const std::string& what)
      : Error(ErrorCode::Diverged, what) {}
};

}  // namespace srg
